"""Run every sweep scenario with its defaults and write one CSV per scenario.

Usage: python3 scripts/run_sweeps.py [--out-dir results] [--trials 500] [--seed 0] [--workers 1]
"""

import argparse
import time
from pathlib import Path

from coupledmimo.harness import SCENARIOS, default_config, emit_csv, run_scenario, with_overrides


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--trials", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--only", nargs="*", choices=SCENARIOS, help="subset of scenarios")
    args = parser.parse_args(argv)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for scenario in args.only or SCENARIOS:
        cfg = with_overrides(default_config(scenario), trials=args.trials, seed=args.seed)
        t0 = time.perf_counter()
        rows = run_scenario(cfg, workers=args.workers)
        path = emit_csv(rows, out / f"{scenario}.csv")
        print(f"{scenario:22s} {len(rows):4d} rows  {time.perf_counter() - t0:6.1f} s  -> {path}")


if __name__ == "__main__":
    main()
