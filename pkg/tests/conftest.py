import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Agregar el directorio raíz al path para importar módulos de la app
sys.path.append(str(Path(__file__).parent.parent))

from app.schemas.distribution import FinitePmf  # noqa: E402


@pytest.fixture
def p_cx() -> FinitePmf:
    """p = 1/8 d1 + 6/8 d2 + 1/8 d3"""
    return FinitePmf(pmf={1: 1 / 8, 2: 6 / 8, 3: 1 / 8})


@pytest.fixture
def q_cx() -> FinitePmf:
    """q = 1/16 d0 + 1/8 d1 + 5/8 d2 + 1/8 d3 + 1/16 d4"""
    return FinitePmf(pmf={0: 1 / 16, 1: 1 / 8, 2: 5 / 8, 3: 1 / 8, 4: 1 / 16})


@pytest.fixture
def random_pmf():
    """Generador sembrado de pmfs finitas con soporte en 0..max_support"""
    def make(seed: int, max_support: int = 20) -> FinitePmf:
        rng = np.random.default_rng(seed)
        size = int(rng.integers(1, max_support + 1))
        weights = rng.random(size + 1) * (rng.random(size + 1) < 0.7)
        if weights.sum() == 0:
            weights[-1] = 1.0
        return FinitePmf.from_weights({k: float(w) for k, w in enumerate(weights)})
    return make


@pytest.fixture
def pareto_quantile_integrals():
    """
    Integrales de la función cuantil de Par(alpha, c) con media lam:
        upper(t) = int_t^1 F^-1 = lam (1 - t)^(1 - 1/alpha)
        lower(t) = int_0^t F^-1 = lam (1 - (1 - t)^(1 - 1/alpha))
    """
    def upper(alpha: float, lam: float, t: np.ndarray) -> np.ndarray:
        return lam * (1.0 - t) ** (1.0 - 1.0 / alpha)

    def lower(alpha: float, lam: float, t: np.ndarray) -> np.ndarray:
        return lam * (1.0 - (1.0 - t) ** (1.0 - 1.0 / alpha))

    return upper, lower


@pytest.fixture
def icv_pairs():
    """
    Pares (p, q) con p <=_icv q y p(i) = q(i) para i <= ell.

    q se sortea con poca masa en 0 y 1 y se descarta si eta(q°) > e^(-2/(ell+1)).
    p sale de q con movimientos que solo tocan índices > ell: bajar masa de j
    a j - 1 o repartirla a j - 1 y j + 1 conservando la media.
    """
    from app.services.branching_service import BranchingService
    from app.services.distribution_service import DistributionService

    def draw_q(rng: np.random.Generator, ell: int):
        weights = rng.random(13) ** 2
        weights[:2] *= 0.2
        q = FinitePmf.from_weights({k: float(w) for k, w in enumerate(weights)})
        eta = BranchingService.extinction_probability(DistributionService.downshift_size_bias(q))
        return q if eta <= math.exp(-2.0 / (ell + 1)) else None

    def lower(rng: np.random.Generator, q: FinitePmf, ell: int) -> FinitePmf:
        weights = dict(q.pmf)
        for _ in range(int(rng.integers(0, 6))):
            movable = [j for j, mass in weights.items() if j >= ell + 2 and mass > 0]
            if not movable:
                break
            j = int(rng.choice(movable))
            amount = weights[j] * float(rng.uniform(0.05, 0.5))
            weights[j] -= amount
            if rng.random() < 0.5:
                weights[j - 1] = weights.get(j - 1, 0.0) + amount
            else:
                weights[j - 1] = weights.get(j - 1, 0.0) + amount / 2
                weights[j + 1] = weights.get(j + 1, 0.0) + amount / 2
        return FinitePmf.from_weights(weights)

    def make(seed: int, ell: int, count: int):
        rng = np.random.default_rng(seed)
        pairs = []
        for _ in range(20 * count):
            q = draw_q(rng, ell)
            if q is not None:
                pairs.append((lower(rng, q, ell), q))
                if len(pairs) == count:
                    break
        return pairs

    return make
