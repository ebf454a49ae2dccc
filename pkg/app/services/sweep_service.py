# app/services/sweep_service.py
"""
Barridos de zeta_CM sobre familias paramétricas de media fija y tabla del
contraejemplo al orden convexo
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Tuple

import numpy as np

from app.config import settings
from app.exceptions import InvalidArgumentError
from app.schemas.distribution import (
    Binomial,
    DegreeDistribution,
    FinitePmf,
    Lognormal,
    MixedPoisson,
    Pareto,
)
from app.schemas.enums import SweepFamily
from app.schemas.reports import CounterexampleReport, SweepRow, SweepSpec
from app.services.branching_service import BranchingService
from app.services.distribution_service import DistributionService

logger = logging.getLogger(__name__)

# Medias por defecto de las curvas de los barridos
DEFAULT_LAMBDAS: List[float] = [0.9, 1.5, 2.0, 3.0, 5.0]

# Rejillas por defecto de cada familia
DEFAULT_GRIDS: Dict[str, List[float]] = {
    "pareto_mpoi": np.geomspace(1.01, 100.0, 60).tolist(),
    "lognormal_mpoi": np.geomspace(0.1, 100.0, 60).tolist(),
    "binomial": [float(n) for n in range(3, 101)],
}

# p <=_cx q con p(0) = 0 < q(0) y zeta_CM(p) < zeta_CM(q)
COUNTEREXAMPLE_P = FinitePmf(pmf={1: 1 / 8, 2: 6 / 8, 3: 1 / 8})
COUNTEREXAMPLE_Q = FinitePmf(pmf={0: 1 / 16, 1: 1 / 8, 2: 5 / 8, 3: 1 / 8, 4: 1 / 16})


def _sweep_point(job: Tuple[SweepFamily, float, float]) -> SweepRow:
    family, lam, param = job
    d = SweepService.family_distribution(family, lam, param)
    zeta = BranchingService.zeta_cm(d).zeta_cm
    return SweepRow(family=family, lam=lam, param=param, zeta_cm=zeta)


class SweepService:

    @staticmethod
    def family_distribution(family: SweepFamily, lam: float, param: float) -> DegreeDistribution:
        """
        Miembro de media lam de la familia:
            pareto_mpoi     MPoi(Par(alpha, lam (1 - 1/alpha))), param = alpha
            lognormal_mpoi  MPoi(LNor(log lam - sigma^2/2, sigma^2)), param = 1/sigma^2
            binomial        Bin(n, lam / n), param = n
        """
        match family:
            case "pareto_mpoi":
                return MixedPoisson(mixing=Pareto(alpha=param, scale=lam * (1.0 - 1.0 / param)))
            case "lognormal_mpoi":
                s2 = 1.0 / param
                return MixedPoisson(mixing=Lognormal(location=math.log(lam) - s2 / 2.0, scale2=s2))
            case "binomial":
                n = int(param)
                return Binomial(n=n, p=lam / n)
        raise InvalidArgumentError(f"Familia desconocida: {family}")

    @staticmethod
    def default_spec(family: SweepFamily, lambdas: Optional[List[float]] = None,
                     grid: Optional[List[float]] = None) -> SweepSpec:
        grid = grid or DEFAULT_GRIDS[family]
        if lambdas is None:
            lambdas = DEFAULT_LAMBDAS
            if family == "binomial":
                # Bin(n, lam / n) necesita lam <= n
                lambdas = [lam for lam in lambdas if lam <= min(grid)]
        return SweepSpec(family=family, lambdas=lambdas, grid=grid)

    @staticmethod
    def run(spec: SweepSpec, workers: Optional[int] = None) -> List[SweepRow]:
        """Una fila por (lambda, punto de la rejilla), en ese orden"""
        workers = settings.workers if workers is None else workers
        jobs = [(spec.family, lam, param) for lam in spec.lambdas for param in spec.grid]
        logger.info("Barrido iniciado", extra={"family": spec.family, "points": len(jobs), "workers": workers})

        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                return list(executor.map(_sweep_point, jobs))
        return [_sweep_point(job) for job in jobs]

    @staticmethod
    def counterexample() -> CounterexampleReport:
        """Media, varianza y extinción de p, q, p° y q°, más zeta_CM(p) y zeta_CM(q)"""
        p, q = COUNTEREXAMPLE_P, COUNTEREXAMPLE_Q
        columns = {
            "p": p,
            "q": q,
            "p_circ": DistributionService.downshift_size_bias(p),
            "q_circ": DistributionService.downshift_size_bias(q),
        }
        return CounterexampleReport(
            columns=list(columns),
            mean=[DistributionService.moment(d, 1) for d in columns.values()],
            variance=[DistributionService.variance(d) for d in columns.values()],
            extinction_probability=[BranchingService.extinction_probability(d) for d in columns.values()],
            zeta_cm_p=BranchingService.zeta_cm(p).zeta_cm,
            zeta_cm_q=BranchingService.zeta_cm(q).zeta_cm,
        )
