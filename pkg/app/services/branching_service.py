# app/services/branching_service.py
"""
Servicio de ramificación: probabilidades de extinción y supervivencia,
el funcional zeta_CM del modelo de configuración, sus cotas superiores,
lambda_cr y la verificación del teorema de monotonía
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy import integrate, optimize

from app.config import settings
from app.exceptions import (
    InvalidArgumentError,
    InvariantViolation,
    MathPreconditionError,
    SupportConditionError,
)
from app.schemas.distribution import (
    DegreeDistribution,
    Dirac,
    FinitePmf,
    Lognormal,
    MixedPoisson,
    MixingDistribution,
    Pareto,
    Poisson,
)
from app.schemas.reports import (
    BoundsReport,
    GfOrderingReport,
    LambdaCrReport,
    OrderWitness,
    TheoremCheck,
    ZetaReport,
)
from app.services.distribution_service import DistributionService
from app.services.order_service import OrderService

logger = logging.getLogger(__name__)

# Holguras de comparación
_PREFIX_TOL = 1e-12
_THRESHOLD_SLACK = 1e-12
_CONCLUSION_SLACK = 1e-9
_GRID_SLACK = 1e-10
# Tolerancia interna de eta al resolver lambda_cr
_LAMBDA_CR_ETA_TOL = 1e-13


class BranchingService:

    # =========================================================
    # EXTINCIÓN Y SUPERVIVENCIA
    # =========================================================

    @staticmethod
    def solve_extinction(d: DegreeDistribution, tol: Optional[float] = None) -> Tuple[float, int, float]:
        """
        Menor punto fijo de G_d en [0, 1].

        Itera s <- G(s) desde 0 (converge de forma monótona al menor punto
        fijo). Si la iteración se estanca cerca de la criticidad, acota la
        raíz de G(s) - s y la resuelve con brentq.

        Returns:
            (eta, iteraciones, residuo |G(eta) - eta|)
        """
        tol = settings.eta_tol if tol is None else tol
        if tol <= 0:
            raise InvalidArgumentError(f"La tolerancia debe ser positiva (tol={tol})")

        # Sin hijos nulos nunca se extingue (incluye delta_1, cuyo menor punto fijo es 0)
        if DistributionService.pmf(d, 0) == 0.0:
            return 0.0, 0, 0.0
        if DistributionService.moment(d, 1) <= 1.0:
            return 1.0, 0, 0.0

        gf = DistributionService.gf_eval
        s, previous_step = 0.0, math.inf
        for iteration in range(1, settings.eta_max_iter + 1):
            g = gf(d, s)
            step = g - s
            if step <= tol:
                return s, iteration, abs(step)
            stalled = step > settings.eta_stall_ratio * previous_step
            if stalled or iteration >= settings.eta_bracket_after:
                logger.info(
                    "Iteración de punto fijo estancada, se pasa a brentq",
                    extra={"distribution": d.type, "iteration": iteration, "s": s, "step": step},
                )
                eta = BranchingService._bracket_extinction(d, g, tol)
                return eta, iteration, abs(gf(d, eta) - eta)
            s, previous_step = g, step

        eta = BranchingService._bracket_extinction(d, s, tol)
        return eta, settings.eta_max_iter, abs(gf(d, eta) - eta)

    @staticmethod
    def _bracket_extinction(d: DegreeDistribution, lower: float, tol: float) -> float:
        # G(s) - s > 0 por debajo de eta y < 0 entre eta y 1
        h = lambda s: DistributionService.gf_eval(d, s) - s
        if h(lower) <= tol:
            return lower
        upper = (lower + 1.0) / 2.0
        while h(upper) >= 0.0:
            if 1.0 - upper < 1e-15:
                logger.warning("No se encontró cambio de signo: eta ~ 1", extra={"distribution": d.type})
                return 1.0
            upper = (upper + 1.0) / 2.0
        return float(optimize.brentq(h, lower, upper, xtol=tol * 1e-3))

    @staticmethod
    def extinction_probability(d: DegreeDistribution, tol: Optional[float] = None) -> float:
        eta, _, _ = BranchingService.solve_extinction(d, tol)
        return eta

    @staticmethod
    def survival(d: DegreeDistribution, tol: Optional[float] = None) -> float:
        return 1.0 - BranchingService.extinction_probability(d, tol)

    # =========================================================
    # FUNCIONAL zeta_CM
    # =========================================================

    @staticmethod
    def zeta_cm(d: DegreeDistribution, tol: Optional[float] = None) -> ZetaReport:
        """
        zeta_CM(p) = 1 - G_p(eta(p°)), fracción límite de la componente gigante.

        Raises:
            MathPreconditionError: media nula o infinita
        """
        DistributionService.require_mean(d)
        warnings = []
        if DistributionService.pmf(d, 2) == 1.0:
            message = "p(2) = 1: fuera de las hipótesis del límite de la componente gigante"
            logger.warning(message)
            warnings.append(message)

        downshifted = DistributionService.downshift_size_bias(d)
        eta, iterations, residual = BranchingService.solve_extinction(downshifted, tol)
        return BranchingService._report(d, eta, iterations, residual, warnings)

    @staticmethod
    def _report(d: DegreeDistribution, eta: float, iterations: int, residual: float, warnings=None) -> ZetaReport:
        root = DistributionService.gf_eval(d, eta)
        return ZetaReport(
            zeta_cm=1.0 - root,
            eta_circ=eta,
            eta_root_gf=root,
            iterations=iterations,
            residual=residual,
            warnings=warnings or [],
        )

    @staticmethod
    def zeta_cm_route_commuted(d: DegreeDistribution, r: float, tol: Optional[float] = None) -> ZetaReport:
        """zeta_CM(T_r d) usando (T_r d)° = T_r(d°): se adelgaza el sesgo desplazado ya calculado"""
        thinned = DistributionService.thin(d, r)
        DistributionService.require_mean(thinned)
        downshifted = DistributionService.thin(DistributionService.downshift_size_bias(d), r)
        eta, iterations, residual = BranchingService.solve_extinction(downshifted, tol)
        return BranchingService._report(thinned, eta, iterations, residual)

    @staticmethod
    def zeta_cm_integral(d: DegreeDistribution, tol: Optional[float] = None) -> float:
        """
        zeta_CM por la identidad integral lambda * int_{eta}^{1} G_{p°}(s) ds,
        con eta = eta(p°). Sirve de verificación cruzada del punto fijo.
        """
        mean = DistributionService.require_mean(d)
        downshifted = DistributionService.downshift_size_bias(d)
        eta = BranchingService.extinction_probability(downshifted, tol)
        value, _ = integrate.quad(
            lambda s: DistributionService.gf_eval(downshifted, s), eta, 1.0,
            epsabs=settings.quad_abs_tol, epsrel=1e-12,
        )
        return mean * value

    # =========================================================
    # COTAS SUPERIORES
    # =========================================================

    @staticmethod
    def _finite_mean(d: DegreeDistribution) -> float:
        mean = DistributionService.moment(d, 1)
        if not math.isfinite(mean):
            raise MathPreconditionError("Las cotas requieren media finita", distribution=d.type)
        return mean

    @staticmethod
    def bound_mean_half(d: DegreeDistribution) -> float:
        """lambda / 2 sin recortar"""
        return BranchingService._finite_mean(d) / 2.0

    @staticmethod
    def bound_crude2(d: DegreeDistribution) -> float:
        mean = BranchingService._finite_mean(d)
        p0, p1 = DistributionService.pmf(d, 0), DistributionService.pmf(d, 1)
        # Con media nula p(1) = 0 y el término desaparece
        return 1.0 - p0 - (p1 * p1 / mean if p1 > 0 else 0.0)

    @staticmethod
    def bound_crude3(d: DegreeDistribution) -> Optional[float]:
        """1 - p(0) - p(1) a - p(2) a^2 con a = p(1) / (lambda - 2 p(2)); None si el denominador es <= 0"""
        mean = BranchingService._finite_mean(d)
        p0, p1, p2 = (DistributionService.pmf(d, k) for k in (0, 1, 2))
        denominator = mean - 2.0 * p2
        if denominator <= 0:
            return None
        a = p1 / denominator
        return 1.0 - p0 - p1 * a - p2 * a * a

    @staticmethod
    def bounds(d: DegreeDistribution, tol: Optional[float] = None) -> BoundsReport:
        crude2 = BranchingService.bound_crude2(d)
        crude3 = BranchingService.bound_crude3(d)
        if crude3 is not None and crude3 > crude2 + 1e-12:
            logger.info("crude3 no domina a crude2", extra={"crude2": crude2, "crude3": crude3})

        return BoundsReport(
            mean_half=min(BranchingService.bound_mean_half(d), 1.0),
            crude2=crude2,
            crude3=crude3,
            zeta_cm=BranchingService.zeta_cm(d, tol).zeta_cm,
        )

    # =========================================================
    # UMBRAL lambda_cr
    # =========================================================

    @staticmethod
    def lambda_cr(tol: float = 1e-6) -> LambdaCrReport:
        """Raíz de lambda * zeta(Poi(lambda)) = 2 en [2, 10]"""
        if tol <= 0:
            raise InvalidArgumentError(f"La tolerancia debe ser positiva (tol={tol})")

        def excess(lam: float) -> float:
            return lam * BranchingService.survival(Poisson(lam=lam), _LAMBDA_CR_ETA_TOL) - 2.0

        root = optimize.brentq(excess, 2.0, 10.0, xtol=tol)
        return LambdaCrReport(lambda_cr=float(root), tol=tol)

    # =========================================================
    # TEOREMA DE MONOTONÍA
    # =========================================================

    @staticmethod
    def _hypotheses(p: FinitePmf, q: FinitePmf, ell: int) -> Tuple[bool, bool]:
        icv = OrderService.check_order(p, q, "icv").holds
        prefix = all(
            abs(p.pmf.get(i, 0.0) - q.pmf.get(i, 0.0)) <= _PREFIX_TOL for i in range(ell + 1)
        )
        return icv, prefix

    @staticmethod
    def verify_ordering_theorem(p: FinitePmf, q: FinitePmf, ell: int = 0) -> TheoremCheck:
        """
        Si p <=_icv q, p(i) = q(i) para i <= ell y eta(q°) <= e^(-2/(ell+1)),
        entonces zeta_CM(p) <= zeta_CM(q).

        Raises:
            InvariantViolation: las tres hipótesis se cumplen y la conclusión no
        """
        if ell < 0:
            raise InvalidArgumentError(f"ell debe ser >= 0 (ell={ell})")

        icv, prefix = BranchingService._hypotheses(p, q, ell)
        threshold = math.exp(-2.0 / (ell + 1))
        eta_q_circ = BranchingService.extinction_probability(DistributionService.downshift_size_bias(q))
        zeta_p = BranchingService.zeta_cm(p).zeta_cm
        zeta_q = BranchingService.zeta_cm(q).zeta_cm

        check = TheoremCheck(
            hypothesis_icv=icv,
            hypothesis_prefix_match=prefix,
            hypothesis_eta_small=eta_q_circ <= threshold + _THRESHOLD_SLACK,
            conclusion_holds=zeta_p <= zeta_q + _CONCLUSION_SLACK,
            ell=ell,
            zeta_p=zeta_p,
            zeta_q=zeta_q,
            eta_q_circ=eta_q_circ,
            threshold=threshold,
        )
        if check.hypotheses_hold and not check.conclusion_holds:
            raise InvariantViolation(
                "zeta_CM(p) > zeta_CM(q) con las hipótesis del teorema de monotonía",
                zeta_p=zeta_p, zeta_q=zeta_q, ell=ell,
            )
        return check

    @staticmethod
    def gf_circ_ordering_region(p: FinitePmf, q: FinitePmf, ell: int = 0, grid: int = 1001) -> GfOrderingReport:
        """G_{p°}(s) >= G_{q°}(s) en una rejilla uniforme de [0, e^(-2/(ell+1))]"""
        upper = math.exp(-2.0 / (ell + 1))
        icv, prefix = BranchingService._hypotheses(p, q, ell)
        if not icv:
            return GfOrderingReport(status="hypothesis_violation", upper=upper, detail="p <=_icv q no se cumple")
        if not prefix:
            return GfOrderingReport(
                status="hypothesis_violation", upper=upper,
                detail=f"p(i) != q(i) para algún i <= {ell}",
            )

        p_circ = DistributionService.downshift_size_bias(p)
        q_circ = DistributionService.downshift_size_bias(q)
        return BranchingService._compare_on_grid(
            lambda s: DistributionService.gf_eval(p_circ, s),
            lambda s: DistributionService.gf_eval(q_circ, s),
            upper, grid,
        )

    @staticmethod
    def mpoi_icv_gf_ordering(mu: MixingDistribution, nu: MixingDistribution, grid: int = 201) -> GfOrderingReport:
        """
        Para p = MPoi(mu), q = MPoi(nu) con mu <=_icv nu y soportes en [c, inf),
        c >= 2, comprueba G_{p°}(s) >= G_{q°}(s) en [0, 1 - 2/c].

        Raises:
            SupportConditionError: c < 2
        """
        c = min(BranchingService._support_lower_end(mu), BranchingService._support_lower_end(nu))
        if c < 2:
            raise SupportConditionError(
                f"Los soportes de las mezclas deben estar en [c, inf) con c >= 2 (c={c})",
                mu=mu.type, nu=nu.type,
            )

        upper = 1.0 - 2.0 / c
        decided = OrderService.mixing_icv(mu, nu)
        if not decided:
            detail = "mu <=_icv nu no se cumple" if decided is False else "mu <=_icv nu no es decidible"
            return GfOrderingReport(status="hypothesis_violation", upper=upper, detail=detail)

        p_circ = DistributionService.downshift_size_bias(MixedPoisson(mixing=mu))
        q_circ = DistributionService.downshift_size_bias(MixedPoisson(mixing=nu))
        return BranchingService._compare_on_grid(
            lambda s: DistributionService.gf_eval(p_circ, s),
            lambda s: DistributionService.gf_eval(q_circ, s),
            upper, grid,
        )

    @staticmethod
    def _support_lower_end(mixing: MixingDistribution) -> float:
        match mixing:
            case Dirac(x=x):
                return x
            case Pareto(scale=c):
                return c
            case Lognormal():
                return 0.0
        raise InvalidArgumentError(f"Distribución de mezcla no soportada: {mixing!r}")

    @staticmethod
    def _compare_on_grid(g_p, g_q, upper: float, grid: int) -> GfOrderingReport:
        for s in np.linspace(0.0, upper, grid):
            lhs, rhs = g_p(float(s)), g_q(float(s))
            if lhs < rhs - _GRID_SLACK:
                return GfOrderingReport(
                    status="fails", upper=upper,
                    witness=OrderWitness(point=float(s), lhs=lhs, rhs=rhs),
                )
        return GfOrderingReport(status="holds", upper=upper)
