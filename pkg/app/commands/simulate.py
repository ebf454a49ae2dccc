# app/commands/simulate.py
"""Comando simulate: fracción de la mayor componente en grafos simulados"""

import argparse

from app.commands.common import load_distributions, probability, render_csv, render_json, resolve_format
from app.config import settings
from app.services.distribution_service import DistributionService
from app.services.simulator_service import SimulatorService


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("simulate", parents=[common], help="Simula el modelo de configuración")
    parser.add_argument("spec", nargs="?", help="Distribución de grado en JSON")
    parser.add_argument("--n", type=int, required=True, help="Nodos por réplica")
    parser.add_argument("--reps", type=int, default=1, help="Número de réplicas")
    parser.add_argument("--thin", type=probability, default=None, help="Adelgaza la distribución con r en [0, 1]")
    parser.add_argument("--dump", type=str, default=None, help="Lista de aristas de la última réplica")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> str:
    (d,) = load_distributions(args, [args.spec], 1)
    if args.thin is not None:
        d = DistributionService.thin(d, args.thin)
    seed = args.seed if args.seed is not None else settings.default_seed

    stats = SimulatorService.simulate_zeta(d, args.n, args.reps, seed, args.workers)
    if args.dump:
        graph = SimulatorService.replicate_graph(d, args.n, seed, args.reps - 1)
        SimulatorService.write_edge_list(graph, args.dump)

    if resolve_format(args) == "csv":
        return render_csv(["replicate", "fraction"], [[str(i), f] for i, f in enumerate(stats.fractions)])
    return render_json(stats)
