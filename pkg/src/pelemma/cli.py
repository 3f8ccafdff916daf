"""Command-line front end.

Exit codes: 0 all verified, 1 at least one bound violated, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .bounds import (
    Verdict,
    bound_chain_verify,
    corollary1_verify,
    corollary2_verify,
    design_input_gain,
    theorem1_verify,
    theorem3_verify,
    verify_io_representation,
)
from .fundamental import (
    counterexample_run,
    image_equality_check,
    parametrize,
    rank_condition_check,
)
from .linalg import lambda_min, numerical_rank
from .lti import simulate
from .pe import hankel, kpe_check, pe_gram, pe_order_check
from .sweep import ALL_CHECKS, GenerationError, SweepConfig, run_sweep

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _UsageError(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--config", type=Path, default=None)
    common.add_argument("--out", type=Path, default=None)
    common.add_argument("--tol-rank", type=float, default=1e-10)
    common.add_argument("--tol-psd", type=float, default=1e-9)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="pelemma", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="simulate a system")
    p.add_argument("--system", type=Path, required=True)
    p.add_argument("--input", type=Path, required=True, help="signal CSV")
    p.add_argument("--x0", default=None, help="comma-separated initial state")

    p = sub.add_parser("hankel", parents=[common], help="Hankel matrix or its Gram")
    p.add_argument("--signal", type=Path, required=True)
    p.add_argument("-L", type=int, required=True)
    p.add_argument("--gram", action="store_true")

    p = sub.add_parser("pe-check", parents=[common], help="rank and K-PE test")
    p.add_argument("--signal", type=Path, required=True)
    p.add_argument("-L", type=int, required=True)
    p.add_argument("--K", type=Path, default=None, help="matrix CSV for the lower bound")

    p = sub.add_parser("bounds", parents=[common], help="verify PE bounds on one trajectory")
    p.add_argument("--system", type=Path, required=True)
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--x0", default=None)
    p.add_argument("-L", type=int, default=1)
    p.add_argument("--which", default="lemma1,thm1,cor1,eq13,eq14,cor2,thm3")

    p = sub.add_parser("fundamental", parents=[common], help="rank condition and image equality")
    p.add_argument("--system", type=Path, required=True)
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--x0", default=None)
    p.add_argument("-L", type=int, required=True)
    p.add_argument("--target", type=Path, default=None,
                   help="signal CSV with L rows of [u_bar, y_bar] to parametrize")

    p = sub.add_parser("counterexample", parents=[common], help="reproduce the necessity counterexample")
    p.add_argument("-N", type=int, default=6)

    p = sub.add_parser("sweep", parents=[common], help="seeded randomized verification sweep")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--which", default=None, help=f"comma list from {','.join(ALL_CHECKS)}")

    p = sub.add_parser("design-input", parents=[common], help="input gain for a target output Gram")
    p.add_argument("--system", type=Path, required=True)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--ky", type=Path, help="matrix CSV for K_y")
    grp.add_argument("--ky-scale", type=float, help="use K_y = c * I")
    return parser


def _x0(arg, n: int) -> np.ndarray:
    if arg is None:
        return np.zeros(n)
    vals = np.array([float(v) for v in arg.split(",") if v.strip()])
    if vals.shape != (n,):
        raise _UsageError(f"--x0 needs {n} values, got {vals.size}")
    return vals


def _emit(obj, args) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, default=io.json_default)
    if args.out is not None and args.command not in ("sweep", "simulate"):
        args.out.write_text(text + "\n")
    print(text)


def cmd_simulate(args) -> int:
    sys_ = io.load_system(args.system)
    u = io.read_signal(args.input)
    x, y = simulate(sys_, _x0(args.x0, sys_.n), u)
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        if sys_.n:
            io.write_signal(args.out / "x.csv", x)
        io.write_signal(args.out / "y.csv", y)
    if args.format == "json":
        print(json.dumps({"x": x.tolist(), "y": y.tolist()}))
    else:
        io.write_signal("/dev/stdout", y)
    return EXIT_OK


def cmd_hankel(args) -> int:
    u = io.read_signal(args.signal)
    M = pe_gram(u, args.L, verify=True) if args.gram else hankel(u, args.L)
    meta = {"kind": "gram" if args.gram else "hankel", "L": args.L, "q": u.shape[1], "N": u.shape[0]}
    if args.out is not None:
        io.write_matrix(args.out, M, meta)
    if args.format == "csv" or args.out is None:
        for row in M:
            print(",".join(repr(float(v)) for v in row))
    return EXIT_OK


def cmd_pe_check(args) -> int:
    u = io.read_signal(args.signal)
    q = u.shape[1]
    K = io.read_matrix(args.K) if args.K else np.zeros((q * args.L, q * args.L))
    cert = kpe_check(u, args.L, K)
    _emit(
        {
            "order": args.L,
            "rank_pe": pe_order_check(u, args.L, args.tol_rank),
            "rank": numerical_rank(hankel(u, args.L), args.tol_rank),
            "lambda_min_gram": lambda_min(cert.gram),
            "margin": cert.margin,
            "tol": cert.tol,
            "kpe": cert.holds,
        },
        args,
    )
    return EXIT_OK


def cmd_bounds(args) -> int:
    sys_ = io.load_system(args.system)
    u = io.read_signal(args.input)
    x0 = _x0(args.x0, sys_.n)
    kw = dict(rank_rtol=args.tol_rank, psd_rtol=args.tol_psd, seed=args.seed)
    records = []
    failed = False
    for name in [w.strip() for w in args.which.split(",") if w.strip()]:
        if name == "lemma1":
            res = verify_io_representation(sys_, x0, u)
            _, y = simulate(sys_, x0, u)
            tol = 1e-8 * (1 + float(np.max(np.abs(y))))
            failed |= res > tol
            records.append({"name": name, "verdict": "holds" if res <= tol else "fails",
                            "margin": -res, "tol": tol})
            continue
        if name == "thm1":
            rep = theorem1_verify(sys_, x0, u, **kw)
        elif name == "cor1":
            rep = corollary1_verify(sys_, x0, u, **kw)
        elif name in ("eq13", "eq14"):
            rep = bound_chain_verify(sys_, x0, u, name, **kw)
        elif name == "cor2":
            rep = corollary2_verify(sys_, x0, u, **kw)
        elif name == "thm3":
            rep = theorem3_verify(sys_, x0, u, args.L, **kw)
        else:
            raise _UsageError(f"unknown bound {name!r}")
        failed |= rep.verdict is Verdict.FAILS
        records.append(rep.to_record())
    if args.format == "csv" and args.out is not None:
        io.write_records(args.out, records, "csv")
        print(json.dumps(records, indent=2, default=io.json_default))
    else:
        _emit(records, args)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_fundamental(args) -> int:
    sys_ = io.load_system(args.system)
    u = io.read_signal(args.input)
    x0 = _x0(args.x0, sys_.n)
    x, y = simulate(sys_, x0, u)
    rank_ok, smin = rank_condition_check(x, u, args.L, args.tol_rank)
    image_ok = image_equality_check(sys_, x0, u, args.L, args.tol_rank)
    out = {"L": args.L, "rank_condition": rank_ok, "sigma_min": smin, "image_equality": image_ok}
    if args.target is not None:
        tgt = io.read_signal(args.target)
        if tgt.shape != (args.L, sys_.m + sys_.p):
            raise _UsageError(f"target must have {args.L} rows of {sys_.m + sys_.p} values")
        g, resid = parametrize(u, y, args.L, tgt[:, :sys_.m], tgt[:, sys_.m:])
        out["residual"] = resid
        out["g_norm"] = float(np.linalg.norm(g))
    _emit(out, args)
    return EXIT_OK if (not rank_ok or image_ok) else EXIT_FAIL


def cmd_counterexample(args) -> int:
    rep = counterexample_run(N=args.N)
    if args.out is not None:
        args.out.write_text(json.dumps(rep.to_record(), indent=2) + "\n")
    if args.format == "json":
        print(json.dumps(rep.to_record(), indent=2))
    else:
        print(rep.table())
    return EXIT_OK if rep.falsified else EXIT_FAIL


def cmd_sweep(args) -> int:
    doc = {}
    if args.config is not None:
        try:
            doc = json.loads(args.config.read_text())
        except json.JSONDecodeError as exc:
            raise _UsageError(f"{args.config}: {exc}") from None
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.trials is not None:
        doc["trials"] = args.trials
    if args.workers is not None:
        doc["workers"] = args.workers
    if args.which is not None:
        doc["which"] = [w.strip() for w in args.which.split(",") if w.strip()]
    doc.setdefault("rank_rtol", args.tol_rank)
    doc.setdefault("psd_rtol", args.tol_psd)
    try:
        config = SweepConfig.from_dict(doc)
    except (TypeError, ValueError) as exc:
        raise _UsageError(f"bad sweep config: {exc}") from None
    result = run_sweep(config)
    summary = result.summary()
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        ext = args.format
        for i, trial in enumerate(result.trials):
            io.write_records(args.out / f"trial_{i:04d}.{ext}", [r.to_record() for r in trial], ext)
        if ext == "json":
            (args.out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
        else:
            row = {k: v for k, v in summary.items()}
            io.write_records(args.out / "summary.csv", [row], "csv")
    print(json.dumps(summary, indent=2, sort_keys=True))
    return result.exit_code


def cmd_design_input(args) -> int:
    sys_ = io.load_system(args.system)
    Ky = io.read_matrix(args.ky) if args.ky else args.ky_scale * np.eye(sys_.p)
    k_u = design_input_gain(sys_, Ky)
    _emit({"k_u": k_u, "order": sys_.n + 1}, args)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "hankel": cmd_hankel,
    "pe-check": cmd_pe_check,
    "bounds": cmd_bounds,
    "fundamental": cmd_fundamental,
    "counterexample": cmd_counterexample,
    "sweep": cmd_sweep,
    "design-input": cmd_design_input,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (_UsageError, ValueError, GenerationError, OSError) as exc:
        print(f"pelemma {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
