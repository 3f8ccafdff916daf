"""Seeded verification sweep over random systems.

    python scripts/run_sweep.py --seed 1 --trials 200 --out results/sweep

Prints the summary as JSON and, with ``--out``, writes one JSON file per trial.
Exit status follows the CLI contract (0 all verified, 1 a bound failed).
"""

import argparse
import json
import sys
import time
from pathlib import Path

from pelemma import io
from pelemma.sweep import ALL_CHECKS, SweepConfig, run_sweep


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--which", default="all", help=f"'all' or a comma list from {','.join(ALL_CHECKS)}")
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args(argv)

    which = ALL_CHECKS if args.which == "all" else tuple(w.strip() for w in args.which.split(","))
    config = SweepConfig(seed=args.seed, trials=args.trials, workers=args.workers, which=which)
    t0 = time.perf_counter()
    result = run_sweep(config)
    elapsed = time.perf_counter() - t0

    summary = result.summary()
    worst = {}
    for rep in result.reports:
        if rep.margin == rep.margin:  # skip NaN from inapplicable reports
            worst[rep.name] = min(worst.get(rep.name, float("inf")), rep.margin)
    summary["min_margin"] = worst
    summary["elapsed_s"] = round(elapsed, 3)

    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "config.json").write_text(json.dumps(config.to_dict(), indent=2) + "\n")
        for i, trial in enumerate(result.trials):
            io.write_records(args.out / f"trial_{i:04d}.json", [r.to_record() for r in trial])
        (args.out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(json.dumps(summary, indent=2, sort_keys=True))
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
