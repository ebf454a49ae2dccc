# =====================================================================
# ESQUEMAS DE INFORMES (salidas de los servicios y de la CLI)
# =====================================================================

from __future__ import annotations

import math
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .enums import GfOrderingStatus, OrderRelation, SweepFamily

# =========================================================
# RAMIFICACIÓN
# =========================================================

class ZetaReport(BaseModel):
    """
    Resultado de zeta_CM(p) = 1 - G_p(eta(p°)).

    Attributes:
        zeta_cm (float): Fracción límite de la componente gigante
        eta_circ (float): eta(p°), extinción del proceso con descendencia p°
        eta_root_gf (float): G_p(eta(p°))
        iterations (int): Iteraciones del resolvedor de punto fijo
        residual (float): |G(s) - s| en el punto devuelto
        warnings (List[str]): Avisos (p. ej. p(2) = 1, fuera de hipótesis)
    """
    zeta_cm: float = Field(..., ge=0, le=1)
    eta_circ: float = Field(..., ge=0, le=1)
    eta_root_gf: float = Field(..., ge=0, le=1)
    iterations: int = Field(..., ge=0)
    residual: float = Field(..., ge=0)
    warnings: List[str] = Field(default_factory=list)


class BoundsReport(BaseModel):
    """
    Cotas superiores de zeta_CM.

    Attributes:
        mean_half (float): min(lambda/2, 1)
        crude2 (float): 1 - p(0) - p(1)^2/lambda
        crude3 (Optional[float]): 1 - p(0) - p(1) a - p(2) a^2, None si lambda <= 2 p(2)
        zeta_cm (float): Valor exacto para comparar
    """
    mean_half: float
    crude2: float
    crude3: Optional[float] = None
    zeta_cm: float


class TheoremCheck(BaseModel):
    """Hipótesis y conclusión del teorema de monotonía con prefijo de longitud ell + 1."""

    hypothesis_icv: bool
    hypothesis_prefix_match: bool
    hypothesis_eta_small: bool
    conclusion_holds: bool
    ell: int = Field(..., ge=0)
    zeta_p: float
    zeta_q: float
    eta_q_circ: float
    threshold: float

    @property
    def hypotheses_hold(self) -> bool:
        return self.hypothesis_icv and self.hypothesis_prefix_match and self.hypothesis_eta_small


class LambdaCrReport(BaseModel):
    lambda_cr: float
    tol: float


# =========================================================
# ÓRDENES ESTOCÁSTICOS
# =========================================================

class OrderWitness(BaseModel):
    """
    Punto donde la desigualdad que define el orden falla por primera vez.

    Attributes:
        point (float): k entero o valor s de la rejilla
        lhs (float): Valor para la primera distribución
        rhs (float): Valor para la segunda distribución
    """
    point: float
    lhs: float
    rhs: float


class OrderVerdict(BaseModel):
    relation: OrderRelation
    holds: bool
    witness: Optional[OrderWitness] = None
    # True cuando el veredicto positivo proviene de una rejilla (orden Lt)
    semi_decision: bool = False

    @model_validator(mode="after")
    def witness_on_failure(self) -> "OrderVerdict":
        if not self.holds and self.witness is None:
            raise ValueError("Un veredicto negativo necesita testigo")
        return self


class ImplicationReport(BaseModel):
    """Veredictos st/cv/icv/lt y las implicaciones de la cadena que fallan (bug del comprobador)."""

    verdicts: Dict[str, OrderVerdict]
    violations: List[str] = Field(default_factory=list)


class ParetoOrderVerdict(BaseModel):
    icx: bool
    cx: bool
    icv: bool
    lambda1: float
    lambda2: float


class GfOrderingReport(BaseModel):
    """
    Comparación G_p°(s) >= G_q°(s) en una rejilla de [0, upper].

    Attributes:
        status (GfOrderingStatus): holds | fails | hypothesis_violation
        upper (float): Extremo derecho de la región comprobada
        witness (Optional[OrderWitness]): Primer punto de fallo
        detail (Optional[str]): Hipótesis incumplida
    """
    status: GfOrderingStatus
    upper: float
    witness: Optional[OrderWitness] = None
    detail: Optional[str] = None

    @property
    def holds(self) -> bool:
        return self.status == "holds"


# =========================================================
# SIMULACIÓN
# =========================================================

class ComponentStats(BaseModel):
    """
    Fracción de la mayor componente conexa sobre réplicas simuladas.

    Attributes:
        n (int): Nodos por réplica
        reps (int): Número de réplicas
        fractions (List[float]): |C_max|/n por réplica
        mean (float): Media de las fracciones
        stddev (float): Desviación típica muestral
        predicted_zeta (Optional[float]): zeta_CM(p) analítico, None si no está definido
        notes (List[str]): Etiquetas (fuera de las condiciones de regularidad, etc.)
    """
    n: int = Field(..., ge=1)
    reps: int = Field(..., ge=1)
    fractions: List[float]
    mean: float
    stddev: float
    predicted_zeta: Optional[float] = None
    notes: List[str] = Field(default_factory=list)

    @field_validator("fractions")
    @classmethod
    def fractions_in_range(cls, value: List[float]) -> List[float]:
        if any(not (0.0 < f <= 1.0) for f in value):
            raise ValueError("Cada fracción debe estar en (0, 1]")
        return value


# =========================================================
# BARRIDOS Y TABLAS
# =========================================================

class SweepSpec(BaseModel):
    """
    Barrido de zeta_CM sobre una familia con media fija lambda.

    Attributes:
        family (SweepFamily): pareto_mpoi (rejilla alpha > 1), lognormal_mpoi
            (rejilla 1/sigma^2 > 0) o binomial (rejilla n >= 3 entera)
        lambdas (List[float]): Medias lambda > 0
        grid (List[float]): Parámetro de la familia, estrictamente creciente
    """
    model_config = ConfigDict(extra="forbid")

    family: SweepFamily
    lambdas: List[float] = Field(..., min_length=1)
    grid: List[float] = Field(..., min_length=1)

    @field_validator("lambdas")
    @classmethod
    def positive_lambdas(cls, value: List[float]) -> List[float]:
        if any(not math.isfinite(x) or x <= 0 for x in value):
            raise ValueError("Cada lambda debe ser positiva y finita")
        return value

    @field_validator("grid")
    @classmethod
    def strictly_increasing(cls, value: List[float]) -> List[float]:
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("La rejilla debe ser estrictamente creciente")
        return value

    @model_validator(mode="after")
    def grid_matches_family(self) -> "SweepSpec":
        if self.family == "pareto_mpoi" and any(a <= 1 for a in self.grid):
            raise ValueError("pareto_mpoi necesita alpha > 1")
        if self.family == "lognormal_mpoi" and any(v <= 0 for v in self.grid):
            raise ValueError("lognormal_mpoi necesita 1/sigma^2 > 0")
        if self.family == "binomial":
            if any(n < 3 or n != int(n) for n in self.grid):
                raise ValueError("binomial necesita n entero >= 3")
            if max(self.lambdas) > min(self.grid):
                raise ValueError("binomial necesita lambda <= n")
        return self


class SweepRow(BaseModel):
    family: SweepFamily
    lam: float = Field(..., serialization_alias="lambda")
    param: float
    zeta_cm: float


class CounterexampleReport(BaseModel):
    """Tabla de medias, varianzas y extinciones de p, q, p° y q°, más zeta_CM(p) y zeta_CM(q)."""

    columns: List[str]
    mean: List[float]
    variance: List[float]
    extinction_probability: List[float]
    zeta_cm_p: float
    zeta_cm_q: float
