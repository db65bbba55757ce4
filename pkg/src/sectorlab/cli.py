"""Command-line entry point: ``sectorlab COMMAND [options] FILES...``."""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .commands import COMMANDS, Flags, run_command
from .errors import InputError, NoOutcome, NumericalError
from .linalg import DEFAULT_TOL
from .report import render_report

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("sectorlab")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="sectorlab",
        description="Sector structure, measurement and modular data of finite-dimensional algebras.",
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("files", nargs="*", metavar="FILE", help="problem spec files (JSON)")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="numerical tolerance (default %(default)g)")
    p.add_argument("--samples", type=int, default=None, help="number of sampled outcomes for 'measure'")
    p.add_argument("--seed", type=int, default=None, help="seed for sampling and randomized checks")
    p.add_argument("--format", choices=("human", "machine"), default="human")
    p.add_argument("-o", "--output", help="write the report here instead of stdout")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if args.tol <= 0:
        print("sectorlab: --tol must be positive", file=sys.stderr)
        return EXIT_INPUT
    if args.samples is not None and args.samples < 0:
        print("sectorlab: --samples must be non-negative", file=sys.stderr)
        return EXIT_INPUT
    flags = Flags(tol=args.tol, samples=args.samples, seed=args.seed)
    try:
        report = run_command(args.command, args.files, flags)
    except (InputError, NoOutcome) as exc:
        print(f"sectorlab: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"sectorlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = render_report(report, args.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
