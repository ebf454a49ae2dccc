# app/commands/lambda_cr.py
"""Comando lambda-cr: umbral lambda_cr de la familia Poisson"""

import argparse

from app.commands.common import render_json, render_model_csv, resolve_format
from app.services.branching_service import BranchingService

DEFAULT_TOL = 1e-6


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser(
        "lambda-cr", parents=[common],
        help="Raíz de lambda * zeta(Poi(lambda)) = 2",
    )
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> str:
    report = BranchingService.lambda_cr(args.tol if args.tol is not None else DEFAULT_TOL)
    if resolve_format(args) == "csv":
        return render_model_csv(report)
    return render_json(report)
