# =====================================================================
# ESQUEMAS DE DISTRIBUCIONES (grado y mezcla)
# =====================================================================

from __future__ import annotations

import json
import math
from typing import Annotated, Dict, Literal, Mapping, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator

from app.exceptions import SpecParseError

# Tolerancia de normalización de una pmf almacenada
PMF_SUM_TOL = 1e-12


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)


# =========================================================
# DISTRIBUCIONES DE MEZCLA (sobre los reales no negativos)
# =========================================================

class Dirac(_Frozen):
    """
    Masa puntual en x.

    Attributes:
        x (float): Punto de la masa, x >= 0
    """
    type: Literal["dirac"] = "dirac"
    x: float = Field(..., ge=0, allow_inf_nan=False)


class Pareto(_Frozen):
    """
    Pareto con forma alpha y escala c, densidad alpha c^alpha t^(-alpha-1) en t > c.

    La media es finita solo si alpha > 1. El tipo admite alpha en (0, 1] porque
    el sesgo por tamaño de Par(alpha, c) con alpha <= 2 produce una Pareto de
    media infinita; las operaciones que requieren media finita la rechazan.

    Attributes:
        alpha (float): Forma, alpha > 0
        scale (float): Escala c > 0
    """
    type: Literal["pareto"] = "pareto"
    alpha: float = Field(..., gt=0, allow_inf_nan=False)
    scale: float = Field(..., gt=0, allow_inf_nan=False)

    @property
    def has_finite_mean(self) -> bool:
        return self.alpha > 1


class Lognormal(_Frozen):
    """
    Lognormal LNor(b, sigma^2).

    Attributes:
        location (float): Localización b
        scale2 (float): Varianza logarítmica sigma^2 > 0
    """
    type: Literal["lognormal"] = "lognormal"
    location: float = Field(..., allow_inf_nan=False)
    scale2: float = Field(..., gt=0, allow_inf_nan=False)


MixingDistribution = Annotated[Union[Dirac, Pareto, Lognormal], Field(discriminator="type")]


# =========================================================
# DISTRIBUCIONES DE GRADO (sobre los enteros no negativos)
# =========================================================

class FinitePmf(_Frozen):
    """
    Pmf de soporte finito. Las masas nulas se descartan al construir y las
    claves se guardan ordenadas, de modo que la igualdad de pmfs está bien definida.

    Attributes:
        pmf (Dict[int, float]): k -> p(k), masas >= 0 que suman 1 (tolerancia 1e-12)
    """
    type: Literal["finite"] = "finite"
    pmf: Dict[int, float]

    @field_validator("pmf")
    @classmethod
    def canonical_pmf(cls, value: Dict[int, float]) -> Dict[int, float]:
        if not value:
            raise ValueError("La pmf no puede estar vacía")
        for k, mass in value.items():
            if k < 0:
                raise ValueError(f"Soporte negativo: {k}")
            if not math.isfinite(mass) or mass < 0:
                raise ValueError(f"Masa inválida en k={k}: {mass}")
        total = math.fsum(value.values())
        if abs(total - 1.0) > PMF_SUM_TOL:
            raise ValueError(f"Las masas suman {total!r}, no 1")
        return {k: value[k] for k in sorted(value) if value[k] > 0}

    @classmethod
    def point_mass(cls, k: int) -> "FinitePmf":
        return cls(pmf={k: 1.0})

    @classmethod
    def from_weights(cls, weights: Mapping[int, float]) -> "FinitePmf":
        """Normaliza pesos no negativos (útil para resultados de reponderaciones)."""
        total = math.fsum(weights.values())
        if total <= 0:
            raise ValueError("Los pesos deben tener suma positiva")
        return cls(pmf={k: w / total for k, w in weights.items()})

    @property
    def support(self) -> list[int]:
        return list(self.pmf)

    @property
    def max_support(self) -> int:
        return max(self.pmf)


class Poisson(_Frozen):
    type: Literal["poisson"] = "poisson"
    lam: float = Field(..., alias="lambda", gt=0, allow_inf_nan=False)


class Binomial(_Frozen):
    type: Literal["binomial"] = "binomial"
    n: int = Field(..., ge=1)
    p: float = Field(..., ge=0, le=1)


class MixedPoisson(_Frozen):
    """
    Poisson mixta MPoi(mu): Poisson cuya tasa es aleatoria con ley mu.
    """
    type: Literal["mpoi"] = "mpoi"
    mixing: MixingDistribution


class Thinned(_Frozen):
    """
    r-adelgazamiento perezoso T_r(base). Se usa cuando no hay forma cerrada
    (o cuando el JSON de entrada lo pide explícitamente).
    """
    type: Literal["thinned"] = "thinned"
    r: float = Field(..., ge=0, le=1)
    base: DegreeDistribution


DegreeDistribution = Annotated[
    Union[FinitePmf, Poisson, Binomial, MixedPoisson, Thinned],
    Field(discriminator="type"),
]

Thinned.model_rebuild()

_degree_adapter: TypeAdapter = TypeAdapter(DegreeDistribution)


# =========================================================
# FORMATO JSON CANÓNICO
# =========================================================

def parse_distribution(text: str | bytes | Mapping) -> DegreeDistribution:
    """
    Convierte una especificación JSON (texto o dict ya decodificado) en una
    distribución de grado. Claves desconocidas se rechazan.

    Raises:
        SpecParseError: si el texto no es JSON
        ValidationError: si el JSON no describe una distribución válida
    """
    if isinstance(text, Mapping):
        return _degree_adapter.validate_python(text)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"Especificación JSON inválida: {exc.msg}", position=exc.pos) from exc
    return _degree_adapter.validate_python(data)


def dump_distribution(dist: DegreeDistribution | MixingDistribution) -> dict:
    """Forma canónica (dict JSON) de una distribución."""
    return dist.model_dump(mode="json", by_alias=True)


def dumps_distribution(dist: DegreeDistribution | MixingDistribution) -> str:
    return json.dumps(dump_distribution(dist), separators=(",", ":"))


__all__ = [
    "Dirac", "Pareto", "Lognormal", "MixingDistribution",
    "FinitePmf", "Poisson", "Binomial", "MixedPoisson", "Thinned", "DegreeDistribution",
    "parse_distribution", "dump_distribution", "dumps_distribution",
]
