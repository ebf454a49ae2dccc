import argparse
import logging
import sys
from typing import List, Optional

from app.commands import bounds, counterexample, lambda_cr, order, simulate, sweep, zeta
from app.commands.common import add_global_options, write_output
from app.exceptions import handle_exception
from app.logging_config import setup_logging

logger = logging.getLogger("giant_component")

COMMANDS = (zeta, counterexample, sweep, bounds, order, simulate, lambda_cr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="giant-component",
        description="Componente gigante del modelo de configuración: zeta_CM, cotas, órdenes y simulación",
    )
    add_global_options(parser)

    common = argparse.ArgumentParser(add_help=False)
    add_global_options(common, suppress=True)

    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers, common)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    logger.debug("Comando iniciado", extra={"command": args.command})

    try:
        write_output(args, args.handler(args))
    except Exception as exc:
        return handle_exception(exc)
    return 0


if __name__ == "__main__":
    sys.exit(main())
