# =====================================================================
# MÓDULO DE ESQUEMAS DE PYDANTIC
# =====================================================================

"""
Esquemas de Pydantic de la librería: distribuciones (entrada de la CLI y de
los servicios) e informes (salida). Cada grupo vive en su propio archivo.
"""

# Importar enumeraciones comunes
from .enums import GfOrderingStatus, OrderRelation, OutputFormat, SweepFamily

# Distribuciones de grado y de mezcla
from .distribution import (
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
    dump_distribution,
    dumps_distribution,
    parse_distribution,
)

# Informes
from .reports import (
    BoundsReport,
    ComponentStats,
    CounterexampleReport,
    GfOrderingReport,
    ImplicationReport,
    LambdaCrReport,
    OrderVerdict,
    OrderWitness,
    ParetoOrderVerdict,
    SweepRow,
    SweepSpec,
    TheoremCheck,
    ZetaReport,
)

__all__ = [
    # Enumeraciones
    "GfOrderingStatus", "OrderRelation", "OutputFormat", "SweepFamily",

    # Distribuciones
    "Dirac", "Pareto", "Lognormal", "MixingDistribution",
    "FinitePmf", "Poisson", "Binomial", "MixedPoisson", "Thinned", "DegreeDistribution",
    "parse_distribution", "dump_distribution", "dumps_distribution",

    # Informes
    "ZetaReport", "BoundsReport", "TheoremCheck", "LambdaCrReport",
    "OrderWitness", "OrderVerdict", "ImplicationReport", "ParetoOrderVerdict", "GfOrderingReport",
    "ComponentStats", "SweepSpec", "SweepRow", "CounterexampleReport",
]
