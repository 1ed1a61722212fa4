"""Command-line entry point: one subcommand per sweep scenario."""

import argparse
import sys

from coupledmimo.errors import SingularSystemError
from coupledmimo.harness import SCENARIOS, default_config, emit_csv, load_config, run_scenario, with_overrides


def build_parser():
    parser = argparse.ArgumentParser(prog="coupledmimo", description=__doc__)
    sub = parser.add_subparsers(dest="scenario", required=True, metavar="SCENARIO")
    for name in SCENARIOS:
        p = sub.add_parser(name, help=f"run the {name} sweep")
        p.add_argument("--config", help="key = value config file; absent keys use scenario defaults")
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--out", default=f"{name}.csv", help="CSV destination (default: %(default)s)")
        p.add_argument("--workers", type=int, default=1, help="grid points evaluated in parallel")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.scenario) if args.config else default_config(args.scenario)
        cfg = with_overrides(cfg, scenario=args.scenario, seed=args.seed, trials=args.trials)
        rows = run_scenario(cfg, workers=max(1, args.workers))
        path = emit_csv(rows, args.out)
    except (ValueError, OSError, SingularSystemError) as exc:
        print(f"coupledmimo: error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {len(rows)} rows to {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
