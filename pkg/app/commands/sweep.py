# app/commands/sweep.py
"""Comando sweep: zeta_CM sobre una familia de media fija"""

import argparse
import typing

from app.commands.common import float_list, render_csv, render_json, resolve_format
from app.schemas.enums import SweepFamily
from app.services.sweep_service import SweepService


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("sweep", parents=[common], help="Barrido de zeta_CM")
    parser.add_argument("--family", required=True, choices=typing.get_args(SweepFamily))
    parser.add_argument("--lambdas", type=float_list, default=None, help="Medias, p. ej. 0.9,1.5,2")
    parser.add_argument(
        "--grid", type=float_list, default=None,
        help="alpha > 1 (pareto_mpoi), 1/sigma^2 > 0 (lognormal_mpoi) o n >= 3 (binomial)",
    )
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> str:
    spec = SweepService.default_spec(args.family, args.lambdas, args.grid)
    rows = SweepService.run(spec, args.workers)

    if resolve_format(args, default="csv") == "json":
        return render_json(rows)
    return render_csv(
        ["family", "lambda", "param", "zeta_cm"],
        [[row.family, row.lam, row.param, row.zeta_cm] for row in rows],
    )
