# app/commands/common.py
"""
Utilidades compartidas por los comandos: opciones globales, lectura de
especificaciones de distribución y renderizado JSON/CSV
"""

import argparse
import csv
import io
import json
import sys
import typing
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence

from pydantic import BaseModel

from app.config import settings
from app.exceptions import InvalidArgumentError
from app.schemas.distribution import DegreeDistribution, parse_distribution
from app.schemas.enums import OutputFormat


# =========================================================
# OPCIONES GLOBALES
# =========================================================

def add_global_options(parser: argparse.ArgumentParser, suppress: bool = False) -> None:
    """
    Opciones válidas antes o después del subcomando. En los subparsers se
    registran con default=SUPPRESS para no pisar lo ya leído.
    """
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--out", type=Path, default=default(None), help="Fichero de salida (por defecto stdout)")
    parser.add_argument("--format", choices=typing.get_args(OutputFormat), default=default(None), help="Formato de salida")
    parser.add_argument("--seed", type=seed, default=default(None), help="Semilla (entero sin signo)")
    parser.add_argument("--tol", type=float, default=default(None), help="Tolerancia numérica")
    parser.add_argument(
        "--dist-file", type=Path, action="append", default=default(None),
        help="Especificación JSON en fichero (repetible)",
    )
    parser.add_argument("--workers", type=int, default=default(None), help="Procesos para barridos y réplicas")
    parser.add_argument("--log-level", default=default(None), help="Nivel de logging (stderr)")


def float_list(text: str) -> List[float]:
    """Tipo argparse: lista de reales separados por comas"""
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"Lista de números inválida: {text!r}") from exc


def seed(text: str) -> int:
    """Tipo argparse: semilla entera sin signo de 64 bits"""
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"La semilla debe estar en [0, 2^64): {text}")
    return value


def probability(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"Debe estar en [0, 1]: {text}")
    return value


# =========================================================
# ENTRADA
# =========================================================

def load_distributions(args: argparse.Namespace, inline: Sequence[Optional[str]], count: int) -> List[DegreeDistribution]:
    """Especificaciones en línea seguidas de las de --dist-file, exactamente count"""
    texts = [text for text in inline if text is not None]
    for path in args.dist_file or []:
        texts.append(Path(path).read_text(encoding="utf-8"))
    if len(texts) != count:
        raise InvalidArgumentError(
            f"Se esperaban {count} especificaciones de distribución y se recibieron {len(texts)}",
        )
    return [parse_distribution(text) for text in texts]


def resolve_format(args: argparse.Namespace, default: str = "json") -> str:
    return args.format or default


# =========================================================
# SALIDA
# =========================================================

def number(value: Any, digits: Optional[int] = None) -> str:
    """Real con digits cifras significativas y punto decimal; None queda vacío"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, float)):
        return f"{value:.{digits or settings.csv_digits}g}"
    return str(value)


def render_json(payload: Any) -> str:
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json", by_alias=True)
    elif isinstance(payload, list):
        payload = [
            item.model_dump(mode="json", by_alias=True) if isinstance(item, BaseModel) else item
            for item in payload
        ]
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([cell if isinstance(cell, str) else number(cell) for cell in row])
    return buffer.getvalue()


def render_model_csv(model: BaseModel) -> str:
    """Modelo plano como cabecera + una fila; las listas se unen con ';'"""
    data = model.model_dump(mode="json", by_alias=True)
    row = []
    for value in data.values():
        if isinstance(value, list):
            row.append(";".join(number(v) if not isinstance(v, str) else v for v in value))
        elif isinstance(value, dict):
            row.append(json.dumps(value, separators=(",", ":")))
        else:
            row.append(value)
    return render_csv(list(data), [row])


def write_output(args: argparse.Namespace, text: str) -> None:
    # Una sola escritura al final del comando
    if args.out is not None:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
