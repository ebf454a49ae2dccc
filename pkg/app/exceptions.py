import json
import logging
import math
import sys
from typing import Any, Dict, Optional, TextIO

from pydantic import ValidationError

logger = logging.getLogger(__name__)


class GiantComponentError(Exception):
    """Error base del dominio. Cada subclase fija su tipo y su código de salida."""

    error_type = "internal_error"
    exit_code = 1

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context = context


class InvalidArgumentError(GiantComponentError, ValueError):
    """Argumento fuera de rango (s, r, tol, orden del momento...)."""

    error_type = "validation_error"
    exit_code = 2


class SpecParseError(GiantComponentError, ValueError):
    error_type = "parse_error"
    exit_code = 2


class MathPreconditionError(GiantComponentError, ArithmeticError):
    """La entrada es válida pero no cumple la hipótesis matemática de la operación."""

    error_type = "math_error"
    exit_code = 3


class TruncationLimitError(MathPreconditionError):
    def __init__(self, k: int, tail: float, tail_tol: float):
        super().__init__(
            f"El truncamiento necesita K > {k} (cola {tail:.3e} > {tail_tol:.1e})",
            k=k, tail=tail, tail_tol=tail_tol,
        )
        self.k = k


class SupportConditionError(MathPreconditionError):
    pass


class InvariantViolation(GiantComponentError, AssertionError):
    """Una conclusión verificada falla aunque sus hipótesis se cumplen."""

    error_type = "invariant_violation"
    exit_code = 4


def error_payload(exc: BaseException) -> Dict[str, Any]:
    """Construye el cuerpo de error JSON para una excepción."""
    if isinstance(exc, GiantComponentError):
        payload: Dict[str, Any] = {
            "error": True,
            "message": exc.message,
            "type": exc.error_type,
        }
        if exc.context:
            payload["context"] = {k: _jsonable(v) for k, v in exc.context.items()}
        return payload

    if isinstance(exc, ValidationError):
        return {
            "error": True,
            "message": "Error de validación en la especificación",
            "type": "validation_error",
            "details": json.loads(exc.json(include_url=False)),
        }

    if isinstance(exc, json.JSONDecodeError):
        return {
            "error": True,
            "message": f"JSON inválido: {exc.msg} (línea {exc.lineno}, columna {exc.colno})",
            "type": "parse_error",
        }

    if isinstance(exc, OSError):
        return {
            "error": True,
            "message": f"No se pudo leer el fichero: {exc.filename or exc}",
            "type": "io_error",
        }

    return {
        "error": True,
        "message": "Error interno",
        "type": "internal_error",
    }


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, GiantComponentError):
        return exc.exit_code
    if isinstance(exc, (ValidationError, json.JSONDecodeError, OSError)):
        return 2
    return 1


def handle_exception(exc: BaseException, stream: Optional[TextIO] = None) -> int:
    """
    Manejador central: registra el error, escribe el cuerpo JSON en stderr
    y devuelve el código de salida del proceso.
    """
    code = exit_code_for(exc)
    payload = error_payload(exc)

    # Solo los errores internos se registran como ERROR
    if code in (2, 3):
        logger.warning(f"{payload['type']}: {payload['message']}")
    else:
        logger.error(f"Unexpected Error: {str(exc)}", exc_info=exc)

    out = stream if stream is not None else sys.stderr
    out.write(json.dumps(payload, ensure_ascii=False) + "\n")
    return code


def _jsonable(value: Any) -> Any:
    # JSON no admite inf ni nan
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)
