"""Command line interface.

Subcommands: spectrum, classical, coherent, evolve, verify, sweep.
Exit codes: 0 success, 1 verification failure, 2 invalid config,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    QuadratureError,
    TruncationBudgetError,
)
from .harness import RUNNERS, SCENARIOS, load_config, run_sweep, run_verify

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_CONFIG = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msf",
        description=("States of a charged particle in a uniform magnetic "
                     "field threaded by an ideal flux line"),
    )
    parser.add_argument("--version", action="version",
                        version=f"msfstates {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", default=None,
                        help="JSON config file (flags override it)")
    common.add_argument("--out", metavar="DIR", default="out",
                        help="output directory (default: out)")
    common.add_argument("--seed", type=int, default=None,
                        help="seed for sampled property checks")
    common.add_argument("--tol", type=float, default=None,
                        help="working numerical tolerance override")
    common.add_argument("--no-figures", action="store_true",
                        help="skip figure rendering")
    sub = parser.add_subparsers(dest="scenario", required=True)
    helps = {
        "spectrum": "emit the level table and splitting diagram",
        "classical": "sample a classical orbit and its invariants",
        "coherent": "mean values and coefficient lattice of one state",
        "evolve": "trajectory of means plus a density snapshot",
        "verify": "run the acceptance criteria battery",
        "sweep": "run one scenario over a list of parameter values",
    }
    for name in SCENARIOS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.tol is not None:
        overrides["numeric_tol"] = args.tol
    if args.no_figures:
        overrides["figures"] = False
    try:
        cfg = load_config(args.config, overrides)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.scenario == "verify":
            files, all_passed, results = run_verify(cfg, out_dir)
            for r in results:
                print(r.row())
            for f in files:
                print(f"wrote {f}")
            return EXIT_OK if all_passed else EXIT_VERIFY_FAILED
        if args.scenario == "sweep":
            files = run_sweep(cfg, out_dir)
        else:
            files = RUNNERS[args.scenario](cfg, out_dir)
        for f in files:
            print(f"wrote {f}")
        return EXIT_OK
    except (ConfigError, DomainError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except (ConvergenceError, QuadratureError, TruncationBudgetError,
            OverflowError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
