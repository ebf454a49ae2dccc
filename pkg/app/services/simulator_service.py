# app/services/simulator_service.py
"""
Simulación del modelo de configuración: muestreo de secuencias de grado,
emparejamiento uniforme de semiaristas y tamaño de la mayor componente
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from app.config import settings
from app.exceptions import GiantComponentError, InvalidArgumentError, MathPreconditionError
from app.schemas.distribution import (
    Binomial,
    DegreeDistribution,
    Dirac,
    FinitePmf,
    Lognormal,
    MixedPoisson,
    Pareto,
    Poisson,
    Thinned,
)
from app.schemas.reports import ComponentStats
from app.services.branching_service import BranchingService
from app.services.distribution_service import DistributionService

logger = logging.getLogger(__name__)

NOTE_INFINITE_SECOND_MOMENT = "fuera de las condiciones de regularidad: m2 = inf"
NOTE_TWO_REGULAR = "p(2) = 1: fuera de las hipótesis del límite (unión de ciclos)"


@dataclass(frozen=True)
class DegreeSequence:
    """Grados d(1..n). sample_degree_sequence siempre devuelve suma par"""
    degrees: np.ndarray

    def __post_init__(self):
        if self.degrees.ndim != 1 or self.degrees.size == 0:
            raise InvalidArgumentError("La secuencia de grados debe ser un vector no vacío")
        if np.any(self.degrees < 0):
            raise InvalidArgumentError("Los grados deben ser no negativos")

    @property
    def n(self) -> int:
        return int(self.degrees.size)

    @property
    def total(self) -> int:
        return int(self.degrees.sum())


@dataclass(frozen=True)
class MultiGraph:
    """
    Multigrafo sobre los nodos 0..n-1; edges es un array (m, 2).
    Se admiten lazos y aristas múltiples.
    """
    n: int
    edges: np.ndarray

    def degrees(self) -> np.ndarray:
        # Un lazo cuenta dos veces
        return np.bincount(self.edges.ravel(), minlength=self.n)


class DisjointSet:
    """Unión-búsqueda con compresión de caminos y unión por tamaño"""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.size = [1] * size
        self.max_size = 1 if size else 0

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.max_size = max(self.max_size, self.size[ra])


def _draw(d: DegreeDistribution, rng: np.random.Generator, n: int) -> np.ndarray:
    match d:
        case FinitePmf():
            return rng.choice(np.array(d.support), size=n, p=np.array(list(d.pmf.values())))
        case Poisson(lam=lam):
            return rng.poisson(lam, n)
        case Binomial(n=trials, p=p):
            return rng.binomial(trials, p, n)
        case MixedPoisson(mixing=mixing):
            return rng.poisson(_draw_rates(mixing, rng, n))
        case Thinned(r=r, base=base):
            return rng.binomial(_draw(base, rng, n), r)
    raise InvalidArgumentError(f"Distribución no soportada: {d!r}")


def _draw_rates(mixing, rng: np.random.Generator, n: int) -> np.ndarray:
    match mixing:
        case Dirac(x=x):
            return np.full(n, x)
        case Pareto(alpha=alpha, scale=scale):
            if not mixing.has_finite_mean:
                raise MathPreconditionError(
                    "No se simulan grados de media infinita (alpha <= 1)", alpha=alpha,
                )
            # numpy genera la Pareto II (Lomax); +1 la desplaza a soporte [1, inf)
            return scale * (rng.pareto(alpha, n) + 1.0)
        case Lognormal(location=b, scale2=s2):
            return rng.lognormal(b, math.sqrt(s2), n)
    raise InvalidArgumentError(f"Distribución de mezcla no soportada: {mixing!r}")


def _replicate_seeds(seed: int, reps: int) -> List[Tuple[int, int]]:
    if seed < 0:
        raise InvalidArgumentError(f"La semilla debe ser un entero sin signo (seed={seed})", seed=seed)
    # Semillas (muestreo, emparejamiento) independientes por réplica
    children = np.random.SeedSequence(seed).spawn(reps)
    return [tuple(int(v) for v in child.generate_state(2)) for child in children]


def _replicate_fraction(d: DegreeDistribution, n: int, seeds: Tuple[int, int]) -> float:
    graph = SimulatorService.match_stubs(SimulatorService.sample_degree_sequence(d, n, seeds[0]), seeds[1])
    return SimulatorService.largest_component_fraction(graph)


class SimulatorService:

    @staticmethod
    def sample_degree_sequence(d: DegreeDistribution, n: int, seed: int) -> DegreeSequence:
        """
        n grados i.i.d. según d. Si la suma es impar se suma 1 al grado de un
        nodo elegido uniformemente.
        """
        if n < 1:
            raise InvalidArgumentError(f"n debe ser >= 1 (n={n})")
        rng = np.random.default_rng(seed)
        degrees = np.asarray(_draw(d, rng, n), dtype=np.int64)
        if degrees.sum() % 2 == 1:
            degrees[rng.integers(n)] += 1
        return DegreeSequence(degrees=degrees)

    @staticmethod
    def match_stubs(ds: DegreeSequence, seed: int) -> MultiGraph:
        """Emparejamiento perfecto uniforme: se barajan las semiaristas y se emparejan consecutivas"""
        if ds.total % 2 == 1:
            raise MathPreconditionError(f"La suma de grados es impar ({ds.total})", total=ds.total)
        rng = np.random.default_rng(seed)
        stubs = np.repeat(np.arange(ds.n), ds.degrees)
        rng.shuffle(stubs)
        return MultiGraph(n=ds.n, edges=stubs.reshape(-1, 2))

    @staticmethod
    def largest_component_fraction(g: MultiGraph) -> float:
        """|C_max| / n; los lazos no conectan y las aristas paralelas son idempotentes"""
        dsu = DisjointSet(g.n)
        for u, v in g.edges.tolist():
            if u != v:
                dsu.union(u, v)
        return dsu.max_size / g.n

    @staticmethod
    def replicate_graph(d: DegreeDistribution, n: int, seed: int, index: int) -> MultiGraph:
        """Reconstruye el grafo de la réplica index de simulate_zeta con la misma semilla"""
        if index < 0:
            raise InvalidArgumentError(f"Réplica fuera de rango: {index}")
        # spawn(k)[i] no depende de k
        sample_seed, match_seed = _replicate_seeds(seed, index + 1)[index]
        return SimulatorService.match_stubs(
            SimulatorService.sample_degree_sequence(d, n, sample_seed), match_seed,
        )

    @staticmethod
    def simulate_zeta(
        d: DegreeDistribution,
        n: int,
        reps: int,
        seed: Optional[int] = None,
        workers: Optional[int] = None,
    ) -> ComponentStats:
        """
        reps réplicas independientes (muestreo, emparejamiento, medida) con
        semillas derivadas de seed. Con workers > 1 las réplicas se reparten
        entre procesos; el resultado conserva el orden de las réplicas.
        """
        if n < 1 or reps < 1:
            raise InvalidArgumentError(f"n y reps deben ser >= 1 (n={n}, reps={reps})")
        seed = settings.default_seed if seed is None else seed
        workers = settings.workers if workers is None else workers

        seeds = _replicate_seeds(seed, reps)
        task = partial(_replicate_fraction, d, n)
        if workers > 1 and reps > 1:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                fractions = list(executor.map(task, seeds))
        else:
            fractions = [task(s) for s in seeds]

        notes = []
        if not math.isfinite(DistributionService.moment(d, 2)):
            notes.append(NOTE_INFINITE_SECOND_MOMENT)
        if DistributionService.pmf(d, 2) == 1.0:
            notes.append(NOTE_TWO_REGULAR)

        try:
            predicted = BranchingService.zeta_cm(d).zeta_cm
        except GiantComponentError as exc:
            logger.info("zeta_CM no disponible para la predicción", extra={"reason": exc.message})
            predicted = None

        values = np.array(fractions)
        stats = ComponentStats(
            n=n,
            reps=reps,
            fractions=fractions,
            mean=float(values.mean()),
            stddev=float(values.std(ddof=1)) if reps > 1 else 0.0,
            predicted_zeta=predicted,
            notes=notes,
        )
        logger.info(
            "Simulación completada",
            extra={"n": n, "reps": reps, "mean": stats.mean, "predicted_zeta": predicted},
        )
        return stats

    @staticmethod
    def write_edge_list(g: MultiGraph, path: Path) -> None:
        """Una arista "u v" por línea con nodos desde 1; los lazos quedan como "u u" """
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for u, v in (g.edges + 1).tolist():
                fh.write(f"{u} {v}\n")
