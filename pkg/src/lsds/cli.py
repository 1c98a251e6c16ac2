"""``lsds-sim`` command-line entry point."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import experiments
from .errors import (
    ConfigError,
    DegenerateDetectorError,
    InfeasibleScenarioError,
    InvalidArgumentError,
    NumericalError,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lsds-sim",
        description="Location spoofing detection over Rician MIMO channels.",
    )
    parser.add_argument("kind", choices=experiments.KINDS)
    parser.add_argument("--config", required=True, help="flat YAML scenario file")
    parser.add_argument("--out", required=True, help="CSV output path (a .meta.json sidecar is written next to it)")
    parser.add_argument("--trials", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--method", choices=experiments.METHODS, default=None)
    parser.add_argument("--workers", type=int, default=None, help="parallel processes (results do not depend on it)")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    overrides = {"trials": args.trials, "seed": args.seed, "method": args.method, "workers": args.workers}
    try:
        config = experiments.load_config(args.config, args.kind, overrides)
        table = experiments.run_experiment(config, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleScenarioError as exc:
        print(f"infeasible scenario: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InvalidArgumentError, DegenerateDetectorError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(json.dumps(table.summary, default=experiments._json_default))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
