# app/commands/bounds.py
"""Comando bounds: cotas superiores de zeta_CM"""

import argparse

from app.commands.common import load_distributions, render_json, render_model_csv, resolve_format
from app.services.branching_service import BranchingService


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("bounds", parents=[common], help="Cotas lambda/2, crude2 y crude3")
    parser.add_argument("spec", nargs="?", help="Distribución de grado en JSON")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> str:
    (d,) = load_distributions(args, [args.spec], 1)
    report = BranchingService.bounds(d, args.tol)
    if resolve_format(args) == "csv":
        return render_model_csv(report)
    return render_json(report)
