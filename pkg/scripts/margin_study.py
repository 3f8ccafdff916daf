"""How tight are the output and state-input bounds?

For each random system the script reports the ratio

    lambda_min(data Gram) / lambda_min(certified lower bound)

for the output bound (input bound ``K_u = fraction * achieved Gram``) and for
the state-input bound at several depths ``L``. A ratio near 1 means the bound
is tight; the guaranteed floor is 1.

    python scripts/margin_study.py --systems 100 --out results/margins.csv
"""

import argparse
import csv
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from pelemma import corollary1_verify, pe_gram, theorem3_verify
from pelemma.linalg import lambda_min
from pelemma.sweep import RandomModelSpec, generate_system


@dataclass
class StudyConfig:
    seed: int = 0
    systems: int = 100
    n_max: int = 5
    mp_max: int = 3
    depths: tuple[int, ...] = (1, 2, 4)
    samples_per_order: int = 20
    x0_scale: float = 1.0
    fraction: float = 0.9


@dataclass
class Row:
    system: int
    n: int
    m: int
    p: int
    bound: str
    L: int
    ratio: float
    verdict: str


@dataclass
class Study:
    config: StudyConfig
    rows: list[Row] = field(default_factory=list)

    def run(self) -> "Study":
        cfg = self.config
        for i, seq in enumerate(np.random.SeedSequence(cfg.seed).spawn(cfg.systems)):
            rng = np.random.default_rng(seq)
            n = int(rng.integers(1, cfg.n_max + 1))
            m = int(rng.integers(1, cfg.mp_max + 1))
            p = min(int(rng.integers(1, cfg.mp_max + 1)), m * (n + 1))
            sys_ = generate_system(RandomModelSpec(n, m, p), rng)
            x0 = cfg.x0_scale * rng.standard_normal(n)

            u = rng.standard_normal((cfg.samples_per_order * (n + 1), m))
            K = cfg.fraction * pe_gram(u, n + 1)
            self._record(i, sys_, "output", n + 1, corollary1_verify(sys_, x0, u, K_u=K))

            for L in cfg.depths:
                u = rng.standard_normal((cfg.samples_per_order * (L + n), m))
                K = cfg.fraction * pe_gram(u, L + n)
                self._record(i, sys_, "state-input", L, theorem3_verify(sys_, x0, u, L, K_u=K))
        return self

    def _record(self, i, sys_, bound, L, rep):
        floor = lambda_min(rep.rhs) if rep.rhs is not None else float("nan")
        ratio = lambda_min(rep.lhs) / floor if floor > 0 else float("inf")
        n, m, p = sys_.dims
        self.rows.append(Row(i, n, m, p, bound, L, ratio, rep.verdict.value))

    def summary(self) -> str:
        lines = [f"{'bound':<12} {'L':>2} {'count':>6} {'min':>9} {'median':>9} {'max':>11}"]
        keys = sorted({(r.bound, r.L) for r in self.rows})
        for bound, L in keys:
            vals = np.array([r.ratio for r in self.rows if (r.bound, r.L) == (bound, L)])
            vals = vals[np.isfinite(vals)]
            lines.append(f"{bound:<12} {L:>2} {vals.size:>6} {vals.min():>9.3g} "
                         f"{np.median(vals):>9.3g} {vals.max():>11.3g}")
        fails = sum(r.verdict == "fails" for r in self.rows)
        lines.append(f"failed bounds: {fails}")
        return "\n".join(lines)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--systems", type=int, default=100)
    ap.add_argument("--x0-scale", type=float, default=1.0)
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args(argv)

    study = Study(StudyConfig(seed=args.seed, systems=args.systems, x0_scale=args.x0_scale)).run()
    print(study.summary())
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(asdict(study.rows[0])))
            w.writeheader()
            w.writerows(asdict(r) for r in study.rows)
    return 1 if any(r.verdict == "fails" for r in study.rows) else 0


if __name__ == "__main__":
    sys.exit(main())
