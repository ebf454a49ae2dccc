# app/commands/zeta.py
"""Comando zeta: zeta_CM(p) de una distribución, opcionalmente adelgazada"""

import argparse

from app.commands.common import (
    load_distributions,
    probability,
    render_json,
    render_model_csv,
    resolve_format,
)
from app.services.branching_service import BranchingService
from app.services.distribution_service import DistributionService


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser(
        "zeta", parents=[common],
        help="Fracción límite de la componente gigante zeta_CM",
    )
    parser.add_argument("spec", nargs="?", help="Distribución de grado en JSON")
    parser.add_argument("--thin", type=probability, default=None, help="Adelgaza la distribución con r en [0, 1]")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> str:
    (d,) = load_distributions(args, [args.spec], 1)
    if args.thin is not None:
        d = DistributionService.thin(d, args.thin)

    report = BranchingService.zeta_cm(d, args.tol)
    if resolve_format(args) == "csv":
        return render_model_csv(report)
    return render_json(report)
