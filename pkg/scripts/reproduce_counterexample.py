"""Print the worked counterexample: a PE output whose ``{M u}`` sequence is not PE.

    python scripts/reproduce_counterexample.py [--N 6] [--json]
"""

import argparse
import json
import sys

from pelemma import counterexample_run


def main(argv=None) -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--N", type=int, default=6)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    rep = counterexample_run(N=args.N)
    print(json.dumps(rep.to_record(), indent=2) if args.json else rep.table())
    return 0 if rep.falsified else 1


if __name__ == "__main__":
    sys.exit(main())
