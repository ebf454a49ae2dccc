# app/commands/order.py
"""Comando order: veredicto p <=_rel q con testigo"""

import argparse
import typing

from app.commands.common import load_distributions, render_json, render_model_csv, resolve_format
from app.config import settings
from app.schemas.distribution import DegreeDistribution, FinitePmf
from app.schemas.enums import OrderRelation
from app.services.distribution_service import DistributionService
from app.services.order_service import OrderService


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("order", parents=[common], help="Órdenes estocásticos entre dos distribuciones")
    parser.add_argument("spec_p", nargs="?", help="Distribución p en JSON")
    parser.add_argument("spec_q", nargs="?", help="Distribución q en JSON")
    parser.add_argument("--relation", required=True, choices=typing.get_args(OrderRelation))
    parser.add_argument(
        "--chain", action="store_true",
        help="Evalúa además la cadena st => icv, cv => icv, icv => lt",
    )
    parser.set_defaults(handler=run)


def _as_finite(d: DegreeDistribution) -> FinitePmf:
    # Las leyes paramétricas se truncan con la tolerancia de cola configurada
    if isinstance(d, FinitePmf):
        return d
    return DistributionService.truncate(d, settings.tail_tol)


def run(args: argparse.Namespace) -> str:
    p, q = (_as_finite(d) for d in load_distributions(args, [args.spec_p, args.spec_q], 2))

    if args.chain:
        report = OrderService.implication_chain(p, q)
        verdict = OrderService.check_order(p, q, args.relation)
        payload = {"verdict": verdict.model_dump(mode="json"), "chain": report.model_dump(mode="json")}
        return render_json(payload)

    verdict = OrderService.check_order(p, q, args.relation)
    if resolve_format(args) == "csv":
        return render_model_csv(verdict)
    return render_json(verdict)
