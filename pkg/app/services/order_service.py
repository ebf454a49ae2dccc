# app/services/order_service.py
"""
Servicio de órdenes estocásticos (st, cx, cv, icx, icv, Lt) entre pmfs
finitas, distancia de Wasserstein y criterios cerrados para Pareto
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import stats

from app.config import settings
from app.exceptions import InvalidArgumentError
from app.schemas.distribution import Dirac, FinitePmf, Lognormal, MixingDistribution, Pareto
from app.schemas.enums import OrderRelation
from app.schemas.reports import ImplicationReport, OrderVerdict, OrderWitness, ParetoOrderVerdict
from app.services.distribution_service import DistributionService

logger = logging.getLogger(__name__)

# Igualdades (medias, lambdas de Pareto) con tolerancia relativa
_REL_EQ = 1e-12


def _masses(p: FinitePmf, kmax: int) -> np.ndarray:
    out = np.zeros(kmax + 1)
    for k, mass in p.pmf.items():
        out[k] = mass
    return out


def _tails(p: FinitePmf, kmax: int) -> np.ndarray:
    """sf[k] = P(X > k) para k = 0..kmax, sumando desde la derecha"""
    masses = _masses(p, kmax)
    suffix = np.cumsum(masses[::-1])[::-1]
    return np.append(suffix[1:], 0.0)


def _first_failure(lhs: np.ndarray, rhs: np.ndarray, points: np.ndarray, tol: float) -> Optional[OrderWitness]:
    """Primer punto con lhs > rhs + tol"""
    bad = np.flatnonzero(lhs > rhs + tol)
    if bad.size == 0:
        return None
    i = int(bad[0])
    return OrderWitness(point=float(points[i]), lhs=float(lhs[i]), rhs=float(rhs[i]))


def _means_equal(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=_REL_EQ, abs_tol=_REL_EQ)


class OrderService:
    """Veredictos de órdenes estocásticos con testigo de fallo"""

    @staticmethod
    def transforms(p: FinitePmf, kmax: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Colas P(X > k), stop-loss E(X - k)+ y E min(X, k) para k = 0..kmax.
        Las tres salen de la cola: E(X - k)+ = sum_{j >= k} P(X > j) y
        E min(X, k) = sum_{j < k} P(X > j).
        """
        sf = _tails(p, kmax)
        stop_loss = np.cumsum(sf[::-1])[::-1]
        min_transform = np.concatenate(([0.0], np.cumsum(sf)[:-1]))
        return sf, stop_loss, min_transform

    @staticmethod
    def check_order(p: FinitePmf, q: FinitePmf, rel: OrderRelation) -> OrderVerdict:
        """
        Decide p <=_rel q.

        st, icx, icv y cx son decisiones exactas sobre los enteros (las
        transformadas son lineales a trozos entre enteros). lt se comprueba
        en una rejilla de [0, 1] y un resultado positivo es una semidecisión.
        """
        tol = settings.order_tol
        # Un punto extra para que E min(X, k) alcance la media de ambas
        kmax = max(p.max_support, q.max_support) + 1
        points = np.arange(kmax + 1)

        if rel == "cv":
            # p <=_cv q  sii  q <=_cx p; el testigo se reorienta a (p, q)
            verdict = OrderService.check_order(q, p, "cx")
            witness = verdict.witness
            if witness is not None:
                witness = OrderWitness(point=witness.point, lhs=witness.rhs, rhs=witness.lhs)
            return OrderVerdict(relation="cv", holds=verdict.holds, witness=witness)

        if rel == "lt":
            return OrderService._check_laplace(p, q, tol)

        sf_p, sl_p, em_p = OrderService.transforms(p, kmax)
        sf_q, sl_q, em_q = OrderService.transforms(q, kmax)

        match rel:
            case "st":
                witness = _first_failure(sf_p, sf_q, points, tol)
            case "icx":
                witness = _first_failure(sl_p, sl_q, points, tol)
            case "icv":
                witness = _first_failure(em_p, em_q, points, tol)
            case "cx":
                witness = _first_failure(sl_p, sl_q, points, tol)
                if witness is None and not _means_equal(sl_p[0], sl_q[0]):
                    # E(X - 0)+ es la media
                    witness = OrderWitness(point=0.0, lhs=float(sl_p[0]), rhs=float(sl_q[0]))
            case _:
                raise InvalidArgumentError(f"Relación de orden desconocida: {rel}")

        return OrderVerdict(relation=rel, holds=witness is None, witness=witness)

    @staticmethod
    def _check_laplace(p: FinitePmf, q: FinitePmf, tol: float) -> OrderVerdict:
        # p <=_Lt q  sii  G_p(s) >= G_q(s) en [0, 1]; s = 0 se compara de forma exacta
        p0, q0 = p.pmf.get(0, 0.0), q.pmf.get(0, 0.0)
        if p0 < q0 - tol:
            return OrderVerdict(
                relation="lt", holds=False,
                witness=OrderWitness(point=0.0, lhs=p0, rhs=q0),
            )

        grid = np.linspace(0.0, 1.0, settings.lt_grid)
        kmax = max(p.max_support, q.max_support)
        g_p = P.polyval(grid, _masses(p, kmax))
        g_q = P.polyval(grid, _masses(q, kmax))
        bad = np.flatnonzero(g_q > g_p + tol)
        if bad.size:
            i = int(bad[0])
            return OrderVerdict(
                relation="lt", holds=False,
                witness=OrderWitness(point=float(grid[i]), lhs=float(g_p[i]), rhs=float(g_q[i])),
            )
        return OrderVerdict(relation="lt", holds=True, semi_decision=True)

    @staticmethod
    def implication_chain(p: FinitePmf, q: FinitePmf) -> ImplicationReport:
        """Evalúa st, cv, icv y lt y comprueba st => icv, cv => icv, icv => lt"""
        verdicts = {rel: OrderService.check_order(p, q, rel) for rel in ("st", "cv", "icv", "lt")}

        violations = []
        for premise, conclusion in (("st", "icv"), ("cv", "icv"), ("icv", "lt")):
            if verdicts[premise].holds and not verdicts[conclusion].holds:
                violations.append(f"{premise} => {conclusion}")

        if violations:
            logger.error(
                "Implicación de órdenes violada",
                extra={"violations": violations, "p": p.pmf, "q": q.pmf},
            )
        return ImplicationReport(verdicts=verdicts, violations=violations)

    @staticmethod
    def wasserstein_distance(p: FinitePmf, q: FinitePmf) -> float:
        """d_W(p, q) = sum_k |F_p(k) - F_q(k)|"""
        return float(stats.wasserstein_distance(
            p.support, q.support,
            u_weights=list(p.pmf.values()), v_weights=list(q.pmf.values()),
        ))

    # =========================================================
    # LEYES DE MEZCLA
    # =========================================================

    @staticmethod
    def pareto_order(a1: float, c1: float, a2: float, c2: float) -> ParetoOrderVerdict:
        """
        Criterios cerrados para Par(a1, c1) frente a Par(a2, c2):
            icx  sii  lambda1 <= lambda2  y  a1 >= a2
            cx   sii  lambda1 == lambda2  y  a1 >= a2
            icv  sii  lambda1 <= lambda2  y  c1 <= c2
        """
        if a1 <= 1 or a2 <= 1:
            raise InvalidArgumentError(f"Los criterios de Pareto necesitan alpha > 1 (a1={a1}, a2={a2})")
        if c1 <= 0 or c2 <= 0:
            raise InvalidArgumentError(f"La escala debe ser positiva (c1={c1}, c2={c2})")

        lam1 = c1 / (1.0 - 1.0 / a1)
        lam2 = c2 / (1.0 - 1.0 / a2)
        lam_eq = math.isclose(lam1, lam2, rel_tol=_REL_EQ)
        lam_le = lam1 < lam2 or lam_eq
        alpha_ge = a1 > a2 or math.isclose(a1, a2, rel_tol=_REL_EQ)
        scale_le = c1 < c2 or math.isclose(c1, c2, rel_tol=_REL_EQ)

        return ParetoOrderVerdict(
            icx=lam_le and alpha_ge,
            cx=lam_eq and alpha_ge,
            icv=lam_le and scale_le,
            lambda1=lam1,
            lambda2=lam2,
        )

    @staticmethod
    def mixing_icv(mu: MixingDistribution, nu: MixingDistribution) -> Optional[bool]:
        """
        mu <=_icv nu para las combinaciones con criterio exacto; None si no se
        sabe decidir (p. ej. lognormal frente a Pareto).
        """
        match mu, nu:
            case Dirac(x=x), Dirac(x=y):
                return x <= y
            case Dirac(x=x), Pareto(scale=c):
                # delta_x <=_icv nu  sii  x <= ínfimo esencial de nu
                return x <= c
            case _, Dirac(x=y):
                # Jensen: mu <=_icv delta_y  sii  m1(mu) <= y
                return DistributionService.mixing_moment(mu, 1) <= y
            case Dirac(x=x), Lognormal():
                return x == 0
            case Pareto(alpha=a1, scale=c1), Pareto(alpha=a2, scale=c2):
                if a1 <= 1 or a2 <= 1:
                    return None
                return OrderService.pareto_order(a1, c1, a2, c2).icv
        return None
