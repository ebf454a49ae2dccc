# =====================================================================
# ENUMERACIONES DEL SISTEMA
# =====================================================================

from __future__ import annotations

from typing import Literal

# =========================================================
# ENUMERACIONES PRINCIPALES
# =========================================================

"""
Enumeraciones principales que definen los tipos del sistema.
Los valores coinciden con los usados en la CLI y en los ficheros de resultados.
"""

# Relaciones de orden estocástico soportadas
OrderRelation = Literal["st", "cx", "cv", "icx", "icv", "lt"]

# Familias paramétricas de los barridos
SweepFamily = Literal["pareto_mpoi", "lognormal_mpoi", "binomial"]

# Resultado de una comprobación de orden entre funciones generatrices
GfOrderingStatus = Literal["holds", "fails", "hypothesis_violation"]

# Formatos de salida de la CLI
OutputFormat = Literal["json", "csv"]
