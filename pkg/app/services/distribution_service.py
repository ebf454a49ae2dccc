# app/services/distribution_service.py
"""
Servicio de álgebra de distribuciones de grado: pmf, funciones generatrices,
momentos, sesgo por tamaño, sesgo desplazado y r-adelgazamiento
"""

import logging
import math
import warnings
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy import integrate, stats
from scipy.special import gammainc, gammaln, xlogy

from app.config import settings
from app.exceptions import InvalidArgumentError, MathPreconditionError, TruncationLimitError
from app.schemas.distribution import (
    Binomial,
    DegreeDistribution,
    Dirac,
    FinitePmf,
    Lognormal,
    MixedPoisson,
    MixingDistribution,
    Pareto,
    Poisson,
    Thinned,
)

logger = logging.getLogger(__name__)

# Semiancho del intervalo de integración en la variable normal estándar (phi(15) ~ 5e-50)
_Z_RANGE = 15.0
_QUAD_LIMIT = 200
_QUAD_REL_TOL = 1e-12
# Por debajo de este tamaño la pmf de una mezcla se integra punto a punto
_SCALAR_PMF_LIMIT = 200


# =========================================================
# FUNCIONES AUXILIARES
# =========================================================

def _poisson_pmf(k, lam: float):
    """pmf de Poisson vectorizada en k; lam = 0 y lam = inf no producen nan"""
    k = np.asarray(k, dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        logp = xlogy(k, lam) - lam - gammaln(k + 1.0)
        return np.nan_to_num(np.exp(logp), nan=0.0)


def _pareto_quantile(scale: float, alpha: float, w: float) -> float:
    # x = c w^(-1/alpha): cambio t = c/u seguido de w = u^alpha
    if w <= 0.0:
        return math.inf
    log_x = math.log(scale) - math.log(w) / alpha
    return math.exp(log_x) if log_x < 700.0 else math.inf


def _lognormal_value(location: float, sigma: float, z: float) -> float:
    y = location + sigma * z
    return math.exp(y) if y < 700.0 else math.inf


def _quad(func: Callable[[float], float], a: float, b: float, points=None) -> float:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        value, abserr = integrate.quad(
            func, a, b,
            epsabs=settings.quad_abs_tol,
            epsrel=_QUAD_REL_TOL,
            limit=_QUAD_LIMIT,
            points=points,
        )
    if caught:
        logger.debug("Cuadratura con aviso", extra={"abserr": abserr, "warning": str(caught[0].message)})
    return value


def _mixing_expectation(mixing: MixingDistribution, func: Callable[[float], float],
                        peak: Optional[float] = None) -> float:
    """
    E[func(X)] con X ~ mixing, por cuadratura adaptativa.
    peak indica dónde se concentra el integrando (se pasa como punto de ruptura).
    """
    match mixing:
        case Dirac(x=x):
            return float(func(x))

        case Pareto(alpha=alpha, scale=scale):
            points = None
            if peak is not None and peak > scale:
                w_peak = (scale / peak) ** alpha
                if 0.0 < w_peak < 1.0:
                    points = [w_peak]
            return _quad(lambda w: func(_pareto_quantile(scale, alpha, w)), 0.0, 1.0, points)

        case Lognormal(location=b, scale2=s2):
            sigma = math.sqrt(s2)
            points = None
            if peak is not None and peak > 0:
                z_peak = (math.log(peak) - b) / sigma
                if -_Z_RANGE < z_peak < _Z_RANGE:
                    points = [z_peak]
            density = stats.norm.pdf
            return _quad(
                lambda z: density(z) * func(_lognormal_value(b, sigma, z)),
                -_Z_RANGE, _Z_RANGE, points,
            )

    raise InvalidArgumentError(f"Distribución de mezcla no soportada: {mixing!r}")


def _mixing_pmf_array(mixing: MixingDistribution, kmax: int) -> np.ndarray:
    ks = np.arange(kmax + 1)
    match mixing:
        case Dirac(x=x):
            return _poisson_pmf(ks, x)
        case Pareto(alpha=alpha, scale=scale):
            f = lambda w: _poisson_pmf(ks, _pareto_quantile(scale, alpha, w))
            a, b = 0.0, 1.0
        case Lognormal(location=loc, scale2=s2):
            sigma = math.sqrt(s2)
            f = lambda z: stats.norm.pdf(z) * _poisson_pmf(ks, _lognormal_value(loc, sigma, z))
            a, b = -_Z_RANGE, _Z_RANGE
    values, _ = integrate.quad_vec(f, a, b, epsabs=settings.quad_abs_tol, epsrel=1e-10, norm="max")
    return np.clip(values, 0.0, 1.0)


Distribution = Union[DegreeDistribution, MixingDistribution]


class DistributionService:
    """Operaciones puras sobre distribuciones de grado y de mezcla"""

    # =========================================================
    # DISTRIBUCIONES DE MEZCLA
    # =========================================================

    @staticmethod
    def laplace(mixing: MixingDistribution, t: float) -> float:
        """Transformada de Laplace L_mu(t) = E[exp(-t X)], t >= 0"""
        if t < 0:
            raise InvalidArgumentError(f"La transformada de Laplace necesita t >= 0 (t={t})")
        if t == 0:
            return 1.0
        return min(1.0, max(0.0, _mixing_expectation(mixing, lambda x: math.exp(-t * x))))

    @staticmethod
    def mixing_moment(mixing: MixingDistribution, i: int) -> float:
        if i not in (1, 2):
            raise InvalidArgumentError(f"Solo se soportan los momentos 1 y 2 (i={i})")
        match mixing:
            case Dirac(x=x):
                return x ** i
            case Pareto(alpha=alpha, scale=scale):
                return alpha * scale ** i / (alpha - i) if alpha > i else math.inf
            case Lognormal(location=b, scale2=s2):
                return math.exp(i * b + i * i * s2 / 2.0)
        raise InvalidArgumentError(f"Distribución de mezcla no soportada: {mixing!r}")

    @staticmethod
    def scale_mixing(mixing: MixingDistribution, r: float) -> MixingDistribution:
        """Ley de r X con X ~ mixing, r > 0"""
        match mixing:
            case Dirac(x=x):
                return Dirac(x=r * x)
            case Pareto(alpha=alpha, scale=scale):
                return Pareto(alpha=alpha, scale=r * scale)
            case Lognormal(location=b, scale2=s2):
                return Lognormal(location=b + math.log(r), scale2=s2)
        raise InvalidArgumentError(f"Distribución de mezcla no soportada: {mixing!r}")

    @staticmethod
    def _size_bias_mixing(mixing: MixingDistribution) -> MixingDistribution:
        mean = DistributionService.mixing_moment(mixing, 1)
        if mean == 0 or not math.isfinite(mean):
            raise MathPreconditionError(
                f"El sesgo por tamaño necesita media finita y no nula (media={mean})",
                mixing=mixing.type,
            )
        match mixing:
            case Dirac():
                return mixing
            case Pareto(alpha=alpha, scale=scale):
                if alpha <= 2:
                    logger.info("Sesgo por tamaño con media infinita", extra={"alpha": alpha - 1, "scale": scale})
                return Pareto(alpha=alpha - 1, scale=scale)
            case Lognormal(location=b, scale2=s2):
                return Lognormal(location=b + s2, scale2=s2)
        raise InvalidArgumentError(f"Distribución de mezcla no soportada: {mixing!r}")

    # =========================================================
    # PMF, FUNCIÓN GENERATRIZ Y MOMENTOS
    # =========================================================

    @staticmethod
    def pmf(d: DegreeDistribution, k: int) -> float:
        """P(X = k). Para una Poisson mixta integra e^-x x^k / k! respecto de la mezcla"""
        if k < 0:
            return 0.0
        d = DistributionService._resolve_thinning(d)
        match d:
            case FinitePmf():
                return d.pmf.get(k, 0.0)
            case Poisson(lam=lam):
                return float(stats.poisson.pmf(k, lam))
            case Binomial(n=n, p=p):
                return float(stats.binom.pmf(k, n, p))
            case MixedPoisson(mixing=mixing):
                value = _mixing_expectation(mixing, lambda x: float(_poisson_pmf(k, x)), peak=float(k) if k else None)
                return min(1.0, max(0.0, value))
            case Thinned(r=r, base=base):
                if r == 1.0:
                    return DistributionService.pmf(base, k)
                if r == 0.0:
                    return 1.0 if k == 0 else 0.0
                ls, ps = DistributionService._support_masses(base)
                mask = ls >= k
                return float(np.dot(ps[mask], stats.binom.pmf(k, ls[mask], r)))
        raise InvalidArgumentError(f"Distribución no soportada: {d!r}")

    @staticmethod
    def pmf_array(d: DegreeDistribution, kmax: int) -> np.ndarray:
        """Vector [p(0), ..., p(kmax)] sin renormalizar"""
        ks = np.arange(kmax + 1)
        d = DistributionService._resolve_thinning(d)
        match d:
            case FinitePmf():
                out = np.zeros(kmax + 1)
                for k, mass in d.pmf.items():
                    if k <= kmax:
                        out[k] = mass
                return out
            case Poisson(lam=lam):
                return stats.poisson.pmf(ks, lam)
            case Binomial(n=n, p=p):
                return stats.binom.pmf(ks, n, p)
            case MixedPoisson(mixing=mixing):
                if kmax <= _SCALAR_PMF_LIMIT or isinstance(mixing, Dirac):
                    return np.array([DistributionService.pmf(d, int(k)) for k in ks])
                return _mixing_pmf_array(mixing, kmax)
            case Thinned(r=r, base=base):
                if r == 1.0:
                    return DistributionService.pmf_array(base, kmax)
                out = np.zeros(kmax + 1)
                if r == 0.0:
                    out[0] = 1.0
                    return out
                ls, ps = DistributionService._support_masses(base)
                for l, mass in zip(ls, ps):
                    out += mass * stats.binom.pmf(ks, l, r)
                return out
        raise InvalidArgumentError(f"Distribución no soportada: {d!r}")

    @staticmethod
    def gf_eval(d: DegreeDistribution, s: float) -> float:
        """G_d(s) = sum_k s^k p(k) para s en [0, 1]"""
        if not 0.0 <= s <= 1.0:
            raise InvalidArgumentError(f"La función generatriz se evalúa en [0, 1] (s={s})")
        match d:
            case FinitePmf():
                ks = np.fromiter(d.pmf.keys(), dtype=float)
                ps = np.fromiter(d.pmf.values(), dtype=float)
                value = float(np.dot(ps, np.power(s, ks)))
            case Poisson(lam=lam):
                value = math.exp(lam * (s - 1.0))
            case Binomial(n=n, p=p):
                value = (1.0 - p + p * s) ** n
            case MixedPoisson(mixing=mixing):
                value = DistributionService.laplace(mixing, 1.0 - s)
            case Thinned(r=r, base=base):
                # G_{T_r p}(s) = G_p(1 - r + r s)
                value = DistributionService.gf_eval(base, min(1.0, 1.0 - r + r * s))
            case _:
                raise InvalidArgumentError(f"Distribución no soportada: {d!r}")
        return min(1.0, max(0.0, value))

    @staticmethod
    def gf_derivative(d: DegreeDistribution, s: float) -> float:
        """G'_d(s) para s en [0, 1); requiere media finita"""
        if not 0.0 <= s < 1.0:
            raise InvalidArgumentError(f"La derivada se evalúa en [0, 1) (s={s})")
        mean = DistributionService.moment(d, 1)
        if not math.isfinite(mean):
            raise MathPreconditionError("La derivada de G requiere media finita", distribution=d.type)

        match d:
            case FinitePmf():
                items = [(k, mass) for k, mass in d.pmf.items() if k >= 1]
                if not items:
                    return 0.0
                ks = np.array([k for k, _ in items], dtype=float)
                ps = np.array([mass for _, mass in items])
                return float(np.dot(ks * ps, np.power(s, ks - 1.0)))
            case Poisson(lam=lam):
                return lam * math.exp(lam * (s - 1.0))
            case Binomial(n=n, p=p):
                return n * p * (1.0 - p + p * s) ** (n - 1)
            case MixedPoisson(mixing=mixing):
                # G'(s) = m1(mu) L_{mu*}(1 - s): sin diferenciación numérica
                if mean == 0:
                    return 0.0
                biased = DistributionService._size_bias_mixing(mixing)
                return mean * DistributionService.laplace(biased, 1.0 - s)
            case Thinned(r=r, base=base):
                if r == 0.0:
                    return 0.0
                return r * DistributionService.gf_derivative(base, 1.0 - r + r * s)
        raise InvalidArgumentError(f"Distribución no soportada: {d!r}")

    @staticmethod
    def moment(d: DegreeDistribution, i: int) -> float:
        """Momento m_i(d) para i en {1, 2}; +inf si diverge"""
        if i not in (1, 2):
            raise InvalidArgumentError(f"Solo se soportan los momentos 1 y 2 (i={i})")
        match d:
            case FinitePmf():
                return math.fsum(k ** i * mass for k, mass in d.pmf.items())
            case Poisson(lam=lam):
                return lam if i == 1 else lam * lam + lam
            case Binomial(n=n, p=p):
                mean = n * p
                return mean if i == 1 else mean * (1.0 - p) + mean * mean
            case MixedPoisson(mixing=mixing):
                m1 = DistributionService.mixing_moment(mixing, 1)
                if i == 1:
                    return m1
                return DistributionService.mixing_moment(mixing, 2) + m1
            case Thinned(r=r, base=base):
                if r == 0.0:
                    return 0.0
                m1 = DistributionService.moment(base, 1)
                if i == 1:
                    return r * m1
                # E[X_r^2] = r^2 E[X^2] + r (1 - r) E[X]
                return r * r * DistributionService.moment(base, 2) + r * (1.0 - r) * m1
        raise InvalidArgumentError(f"Distribución no soportada: {d!r}")

    @staticmethod
    def variance(d: DegreeDistribution) -> float:
        m1 = DistributionService.moment(d, 1)
        m2 = DistributionService.moment(d, 2)
        if not math.isfinite(m2):
            return math.inf
        return max(0.0, m2 - m1 * m1)

    @staticmethod
    def require_mean(d: DegreeDistribution) -> float:
        """Devuelve m1(d) o lanza MathPreconditionError si es 0 o infinita"""
        mean = DistributionService.moment(d, 1)
        if mean <= 0 or not math.isfinite(mean):
            raise MathPreconditionError(
                f"La operación requiere media finita y no nula (media={mean})",
                distribution=d.type,
                mean=mean,
            )
        return mean

    # =========================================================
    # SESGO POR TAMAÑO Y SESGO DESPLAZADO
    # =========================================================

    @staticmethod
    def size_bias(d: Distribution) -> Distribution:
        """
        p*(k) = k p(k) / m1(p).

        Formas cerradas para las mezclas (Dirac, Pareto, lognormal) y
        reponderación directa para pmfs finitas. Las demás leyes de grado se
        truncan con la tolerancia de cola configurada antes de reponderar.
        """
        if isinstance(d, (Dirac, Pareto, Lognormal)):
            return DistributionService._size_bias_mixing(d)

        DistributionService.require_mean(d)
        if not isinstance(d, FinitePmf):
            logger.debug("Sesgo por tamaño vía truncamiento", extra={"distribution": d.type})
            d = DistributionService.truncate(d, settings.tail_tol)
        return FinitePmf.from_weights({k: k * mass for k, mass in d.pmf.items() if k >= 1})

    @staticmethod
    def downshift_size_bias(d: DegreeDistribution) -> DegreeDistribution:
        """p°(k) = p*(k + 1) = (k + 1) p(k + 1) / m1(p)"""
        DistributionService.require_mean(d)
        match d:
            case FinitePmf():
                return FinitePmf.from_weights({k - 1: k * mass for k, mass in d.pmf.items() if k >= 1})
            case Poisson():
                return d
            case Binomial(n=n, p=p):
                return Binomial(n=n - 1, p=p) if n >= 2 else FinitePmf.point_mass(0)
            case MixedPoisson(mixing=mixing):
                return MixedPoisson(mixing=DistributionService._size_bias_mixing(mixing))
            case Thinned(r=r, base=base):
                # (T_r p)° = T_r(p°)
                return DistributionService.thin(DistributionService.downshift_size_bias(base), r)
        raise InvalidArgumentError(f"Distribución no soportada: {d!r}")

    # =========================================================
    # ADELGAZAMIENTO
    # =========================================================

    @staticmethod
    def thin(d: DegreeDistribution, r: float) -> DegreeDistribution:
        """
        r-adelgazamiento T_r d: cada unidad se conserva con probabilidad r.
        Simplifica a forma cerrada siempre que la familia lo permite.
        """
        if not 0.0 <= r <= 1.0:
            raise InvalidArgumentError(f"El adelgazamiento necesita r en [0, 1] (r={r})")
        if r == 1.0:
            return d
        if r == 0.0:
            return FinitePmf.point_mass(0)

        match d:
            case FinitePmf():
                if len(d.pmf) == 1:
                    (n,) = d.pmf
                    return d if n == 0 else Binomial(n=n, p=r)
                return DistributionService._thin_finite(d, r)
            case Binomial(n=n, p=a):
                return Binomial(n=n, p=a * r)
            case Poisson(lam=lam):
                return Poisson(lam=lam * r)
            case MixedPoisson(mixing=Dirac(x=x)):
                return Poisson(lam=x * r) if x > 0 else FinitePmf.point_mass(0)
            case MixedPoisson(mixing=mixing):
                # T_r MPoi(mu) = MPoi(r mu)
                return MixedPoisson(mixing=DistributionService.scale_mixing(mixing, r))
            case Thinned(r=r0, base=base):
                return DistributionService.thin(base, r0 * r)
        return Thinned(r=r, base=d)

    @staticmethod
    def _resolve_thinning(d: DegreeDistribution) -> DegreeDistribution:
        """
        Forma cerrada de un Thinned construido a mano (p. ej. desde JSON).
        Evita truncar una base paramétrica de cola pesada.
        """
        if isinstance(d, Thinned):
            resolved = DistributionService.thin(d.base, d.r)
            if not isinstance(resolved, Thinned):
                return resolved
        return d

    @staticmethod
    def _thin_finite(d: FinitePmf, r: float) -> FinitePmf:
        """T_r p(k) = sum_{l >= k} p(l) C(l, k) r^k (1 - r)^(l - k), evaluado en bloque"""
        out = np.zeros(d.max_support + 1)
        for l, mass in d.pmf.items():
            out[: l + 1] += mass * stats.binom.pmf(np.arange(l + 1), l, r)
        return FinitePmf.from_weights({k: float(v) for k, v in enumerate(out)})

    # =========================================================
    # COLAS Y TRUNCAMIENTO
    # =========================================================

    @staticmethod
    def survival_function(d: DegreeDistribution, k: int) -> float:
        """P(X > k)"""
        if k < 0:
            return 1.0
        d = DistributionService._resolve_thinning(d)
        match d:
            case FinitePmf():
                return math.fsum(mass for j, mass in d.pmf.items() if j > k)
            case Poisson(lam=lam):
                return float(stats.poisson.sf(k, lam))
            case Binomial(n=n, p=p):
                return float(stats.binom.sf(k, n, p))
            case MixedPoisson(mixing=mixing):
                # P(Poi(x) > k) = P(Gamma(k + 1) <= x)
                return _mixing_expectation(mixing, lambda x: float(gammainc(k + 1, x)), peak=float(k + 1))
            case Thinned(r=r, base=base):
                if r == 1.0:
                    return DistributionService.survival_function(base, k)
                if r == 0.0:
                    return 0.0
                ls, ps = DistributionService._support_masses(base)
                mask = ls > k
                missing = max(0.0, 1.0 - math.fsum(ps))
                return float(np.dot(ps[mask], stats.binom.sf(k, ls[mask], r))) + missing
        raise InvalidArgumentError(f"Distribución no soportada: {d!r}")

    @staticmethod
    def truncate(d: DegreeDistribution, tail_tol: float) -> FinitePmf:
        """
        Menor K con masa acumulada >= 1 - tail_tol; las masas se renormalizan.

        Raises:
            InvalidArgumentError: tail_tol <= 0
            MathPreconditionError: media infinita
            TruncationLimitError: K superaría el tope configurado
        """
        if tail_tol <= 0:
            raise InvalidArgumentError(f"tail_tol debe ser positiva ({tail_tol})")
        mean = DistributionService.moment(d, 1)
        if not math.isfinite(mean):
            raise MathPreconditionError("Solo se truncan distribuciones de media finita", distribution=d.type)

        kmax = DistributionService._truncation_point(d, tail_tol)
        masses = DistributionService.pmf_array(d, kmax)
        return FinitePmf.from_weights({k: float(m) for k, m in enumerate(masses)})

    @staticmethod
    def _truncation_point(d: DegreeDistribution, tail_tol: float) -> int:
        if isinstance(d, FinitePmf):
            cumulative = 0.0
            for k, mass in d.pmf.items():
                cumulative += mass
                if cumulative >= 1.0 - tail_tol:
                    return k
            return d.max_support

        sf = DistributionService.survival_function
        cap = settings.truncate_cap
        if sf(d, 0) <= tail_tol:
            return 0

        # Búsqueda exponencial y luego bisección entera (la cola es monótona)
        lo, hi = 0, 1
        while sf(d, hi) > tail_tol:
            if hi >= cap:
                raise TruncationLimitError(cap, sf(d, cap), tail_tol)
            lo, hi = hi, min(2 * hi, cap)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if sf(d, mid) <= tail_tol:
                hi = mid
            else:
                lo = mid
        return hi

    @staticmethod
    def _support_masses(d: DegreeDistribution) -> Tuple[np.ndarray, np.ndarray]:
        """Soporte y masas (sin renormalizar) de una base, truncada si es paramétrica"""
        if isinstance(d, FinitePmf):
            return (
                np.fromiter(d.pmf.keys(), dtype=int),
                np.fromiter(d.pmf.values(), dtype=float),
            )
        kmax = DistributionService._truncation_point(d, settings.tail_tol * 1e-3)
        masses = DistributionService.pmf_array(d, kmax)
        return np.arange(kmax + 1), masses
