"""Command-line front end: ``py-chemostat <command> --config PATH [options]``."""

import argparse
import logging
import sys

from ..errors import ChemostatError
from ._commands import commands
from ._config import read_document

__all__ = ["build_parser", "main"]

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"
_LEVELS = {0: logging.WARNING, 1: logging.INFO}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="Path to the JSON run config.")
    common.add_argument("--out", default="out", help="Artifact directory (default: out).")
    common.add_argument("--rel-tol", type=float, help="Integrator relative tolerance.")
    common.add_argument("--abs-tol", type=float, help="Integrator absolute tolerance.")
    common.add_argument("--t-end", type=float, help="Integration horizon.")
    common.add_argument("--seed", type=int, help="Seed for randomized checks.")
    common.add_argument("--workers", type=int, help="Threads for grid evaluations.")
    common.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for INFO, -vv for DEBUG logging.")

    parser = argparse.ArgumentParser(
        prog="py-chemostat",
        description="Equilibria, stability and Hopf analysis of a nutrient-prey-predator "
                    "chemostat.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, func in commands().items():
        summary = (func.__doc__ or "").strip().splitlines()
        subparsers.add_parser(name, parents=[common], help=summary[0] if summary else None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=_LEVELS.get(args.verbose, logging.DEBUG), format=LOG_FORMAT)
    try:
        document = read_document(args.config)
        return commands()[args.command](document, args)
    except ChemostatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
