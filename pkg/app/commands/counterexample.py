# app/commands/counterexample.py
"""Comando counterexample: tabla de índices de p, q, p° y q°"""

import argparse

from app.commands.common import render_csv, render_json, resolve_format
from app.services.sweep_service import SweepService


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser(
        "counterexample", parents=[common],
        help="Media, varianza y extinción del contraejemplo al orden convexo",
    )
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> str:
    report = SweepService.counterexample()
    if resolve_format(args, default="csv") == "json":
        return render_json(report)

    rows = [
        ["mean", *report.mean],
        ["variance", *report.variance],
        ["extinction_probability", *report.extinction_probability],
        ["zeta_cm", report.zeta_cm_p, report.zeta_cm_q, None, None],
    ]
    formatted = [[row[0], *("" if v is None else f"{v:.3f}" for v in row[1:])] for row in rows]
    return render_csv(["index", *report.columns], formatted)
