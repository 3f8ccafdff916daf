"""Quantitative PE lower bounds, each checked numerically on a concrete trajectory.

Every ``*_verify`` function simulates the system, assembles the achieved Gram
(``lhs``) and the claimed lower bound (``rhs``), and returns a
:class:`BoundReport`. The intermediate inequalities of each argument are
replayed and their margins stored in ``report.steps``; a negative step margin
beyond tolerance flips the verdict to ``fails`` just like the headline margin.
"""

from __future__ import annotations

import enum
import time
import warnings
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .linalg import (
    DEFAULT_PSD_RTOL,
    DEFAULT_RANK_RTOL,
    inv_sqrt_psd,
    lambda_max,
    lambda_min,
    numerical_rank,
    psd_tolerance,
    singular_values,
    sym,
)
from .lti import (
    LtiSystem,
    annihilating_polynomial,
    as_signal,
    is_controllable,
    is_output_reachable,
    markov_parameters,
    relative_degree,
    simulate,
)
from .pe import hankel, pe_gram, pe_order_check
from .structmat import (
    RankDeficiencyWarning,
    build_Dbar,
    build_Gammabar,
    build_M,
    build_relaxed_M,
    build_T,
    build_Z,
)

__all__ = [
    "Verdict",
    "BoundReport",
    "verify_io_representation",
    "theorem1_verify",
    "corollary1_verify",
    "directional_bound_output",
    "directional_bound_input",
    "bound_chain_verify",
    "corollary2_verify",
    "theorem3_verify",
    "robust_bound_verify",
    "design_input_gain",
    "state_input_matrix",
    "DEFAULT_KU_FRACTION",
]

DEFAULT_KU_FRACTION = 0.9


class Verdict(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INAPPLICABLE = "inapplicable"


@dataclass
class BoundReport:
    name: str
    verdict: Verdict
    margin: float
    tol: float
    lhs: np.ndarray | None = None
    rhs: np.ndarray | None = None
    steps: dict[str, float] = field(default_factory=dict)
    context: dict[str, Any] = field(default_factory=dict)
    reason: str = ""
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS

    def to_record(self, include_timings: bool = True) -> dict[str, Any]:
        rec = {
            "name": self.name,
            "verdict": self.verdict.value,
            "margin": _finite_or_none(self.margin),
            "tol": _finite_or_none(self.tol),
            "dims": self.context.get("dims"),
            "seed": self.context.get("seed"),
            "steps": {k: _finite_or_none(v) for k, v in self.steps.items()},
            "reason": self.reason,
        }
        if include_timings:
            rec["timings"] = dict(self.timings)
        return rec


def _finite_or_none(v):
    if v is None:
        return None
    v = float(v)
    return v if np.isfinite(v) else None


def _inapplicable(name: str, reason: str, context: dict, t0: float) -> BoundReport:
    return BoundReport(
        name=name,
        verdict=Verdict.INAPPLICABLE,
        margin=float("nan"),
        tol=float("nan"),
        context=context,
        reason=reason,
        timings={"total_s": time.perf_counter() - t0},
    )


def _context(sys: LtiSystem, u: np.ndarray, **extra) -> dict[str, Any]:
    ctx = {"dims": list(sys.dims), "N": int(u.shape[0])}
    ctx.update(extra)
    return ctx


def _finish(name, lhs, rhs, steps, step_tols, context, t0, psd_rtol, reason=""):
    tol = psd_tolerance(lhs, rhs, psd_rtol)
    margin = lambda_min(lhs - rhs)
    ok = margin >= -tol and all(steps[k] >= -step_tols[k] for k in step_tols)
    return BoundReport(
        name=name,
        verdict=Verdict.HOLDS if ok else Verdict.FAILS,
        margin=margin,
        tol=tol,
        lhs=lhs,
        rhs=rhs,
        steps=steps,
        context=context,
        reason=reason,
        timings={"total_s": time.perf_counter() - t0},
    )


def _combine(d: np.ndarray, S: np.ndarray, count: int) -> np.ndarray:
    """``sum_i d[i] * S[i:i+count]`` along the first axis."""
    out = np.zeros((count,) + S.shape[1:])
    for i, di in enumerate(d):
        out += di * S[i:i + count]
    return out


def _replay_chain(d, S1, rows, count, lhs, K, psd_rtol):
    """Shared tail of the output-Gram arguments.

    ``rows`` holds the stacked output samples (one per row); ``S1`` is the
    window Gram the bound starts from. Returns ``(steps, step_tols)``.
    """
    n = d.size - 1
    Yd = _combine(d, rows, count)
    S2 = Yd.T @ Yd
    S3 = np.zeros_like(S2)
    for i in range(n + 1):
        seg = rows[i:i + count]
        S3 += seg.T @ seg
    steps = {
        "window_gram_dominates_K": lambda_min(S1 - K),
        "io_identity_residual": -float(np.max(np.abs(S1 - S2), initial=0.0)),
        "unit_norm_d": lambda_min(S3 - S2),
        "window_overlap": lambda_min((n + 1) * lhs - S3),
    }
    scale = float(np.max(np.abs(rows), initial=0.0))
    step_tols = {
        "window_gram_dominates_K": psd_tolerance(S1, K, psd_rtol),
        "io_identity_residual": 1e-8 * (1.0 + scale) ** 2 * max(count, 1),
        "unit_norm_d": psd_tolerance(S3, S2, psd_rtol),
        "window_overlap": psd_tolerance((n + 1) * lhs, S3, psd_rtol),
    }
    return steps, step_tols


def verify_io_representation(sys: LtiSystem, x0, u) -> float:
    """Largest residual ``|M u_[k-n,k] - [y_(k-n) ... y_k] d|`` over ``k >= n``."""
    u = as_signal(u, sys.m)
    n, N = sys.n, u.shape[0]
    if N < n + 1:
        raise ValueError(f"trajectory of length {N} is shorter than n + 1 = {n + 1}")
    _, y = simulate(sys, x0, u)
    d = annihilating_polynomial(sys)
    MU = build_M(sys) @ hankel(u, n + 1)
    Yd = _combine(d, y, N - n)
    return float(np.max(np.linalg.norm(MU.T - Yd, axis=1)))


def theorem1_verify(
    sys: LtiSystem,
    x0,
    u,
    K_u=None,
    rank_rtol: float = DEFAULT_RANK_RTOL,
    psd_rtol: float = DEFAULT_PSD_RTOL,
    seed: int | None = None,
) -> BoundReport:
    """Output Gram versus ``K_u / (n+1)`` where ``K_u`` bounds the Gram of
    ``{M u_[k-n,k]}``.

    The report is ``inapplicable`` when that sequence is not PE of order 1 or
    its Gram does not dominate ``K_u``.
    """
    t0 = time.perf_counter()
    name = "thm1"
    u = as_signal(u, sys.m)
    n, N = sys.n, u.shape[0]
    ctx = _context(sys, u, seed=seed)
    if N < n + 1:
        raise ValueError("trajectory too short")
    _, y = simulate(sys, x0, u)
    d = annihilating_polynomial(sys)
    MU = build_M(sys) @ hankel(u, n + 1)
    if numerical_rank(MU, rank_rtol) < sys.p:
        return _inapplicable(name, "{M u} is not PE of order 1", ctx, t0)
    G_mu = sym(MU @ MU.T)
    K = DEFAULT_KU_FRACTION * G_mu if K_u is None else sym(np.atleast_2d(K_u))
    if K.shape != G_mu.shape:
        raise ValueError(f"K_u must be {G_mu.shape}, got {K.shape}")
    if lambda_min(G_mu - K) < -psd_tolerance(G_mu, K, psd_rtol):
        return _inapplicable(name, "{M u} is not K_u-PE of order 1", ctx, t0)
    lhs = sym(y.T @ y)
    rhs = K / (n + 1)
    steps, step_tols = _replay_chain(d, G_mu, y, N - n, lhs, K, psd_rtol)
    return _finish(name, lhs, rhs, steps, step_tols, ctx, t0, psd_rtol)


def corollary1_verify(
    sys: LtiSystem,
    x0,
    u,
    K_u=None,
    rank_rtol: float = DEFAULT_RANK_RTOL,
    psd_rtol: float = DEFAULT_PSD_RTOL,
    seed: int | None = None,
    name: str = "cor1",
) -> BoundReport:
    """Output Gram versus ``M K_u M^T / (n+1)`` for an order-``n+1`` input bound."""
    t0 = time.perf_counter()
    u = as_signal(u, sys.m)
    n, N = sys.n, u.shape[0]
    ctx = _context(sys, u, seed=seed)
    if not is_output_reachable(sys, rank_rtol):
        return _inapplicable(name, "system is not output reachable", ctx, t0)
    if N < n + 1:
        raise ValueError("trajectory too short")
    G_u = pe_gram(u, n + 1)
    K = DEFAULT_KU_FRACTION * G_u if K_u is None else sym(np.atleast_2d(K_u))
    if K.shape != G_u.shape:
        raise ValueError(f"K_u must be {G_u.shape}, got {K.shape}")
    if lambda_min(G_u - K) < -psd_tolerance(G_u, K, psd_rtol):
        return _inapplicable(name, "input is not K_u-PE of order n+1", ctx, t0)
    _, y = simulate(sys, x0, u)
    d = annihilating_polynomial(sys)
    M = build_M(sys)
    lhs = sym(y.T @ y)
    MKM = sym(M @ K @ M.T)
    rhs = MKM / (n + 1)
    S1 = sym(M @ G_u @ M.T)
    steps, step_tols = _replay_chain(d, S1, y, N - n, lhs, MKM, psd_rtol)
    return _finish(name, lhs, rhs, steps, step_tols, ctx, t0, psd_rtol)


def directional_bound_output(sys: LtiSystem, K_u) -> np.ndarray:
    """``lambda_min(K_u) / (n+1) * sigma_min(Dbar)^2 * Gamma Gamma^T``."""
    K = sym(np.atleast_2d(K_u))
    d = annihilating_polynomial(sys)
    Gamma = markov_parameters(sys).stacked
    smin = singular_values(build_Dbar(d))[-1]
    return lambda_min(K) / (sys.n + 1) * smin**2 * sym(Gamma @ Gamma.T)


def directional_bound_input(
    sys: LtiSystem, K_u, rank_rtol: float = DEFAULT_RANK_RTOL
) -> np.ndarray:
    """``lambda_min(Gammabar K_u Gammabar^T) / (n+1) * I_p``.

    ``Gammabar`` is block lower-triangular with ``D`` on its diagonal, so it is
    row-rank deficient exactly when ``D`` is; the bound is then returned as an
    exact zero instead of a rounding-level eigenvalue.
    """
    K = sym(np.atleast_2d(K_u))
    p = sys.p
    if numerical_rank(sys.D, rank_rtol) < p:
        return np.zeros((p, p))
    Gb = build_Gammabar(markov_parameters(sys))
    lam = max(lambda_min(Gb @ K @ Gb.T), 0.0)
    return lam / (sys.n + 1) * np.eye(p)


def bound_chain_verify(
    sys: LtiSystem,
    x0,
    u,
    which: str,
    K_u=None,
    rank_rtol: float = DEFAULT_RANK_RTOL,
    psd_rtol: float = DEFAULT_PSD_RTOL,
    seed: int | None = None,
) -> BoundReport:
    """Check ``bound <= M K_u M^T/(n+1) <= output Gram`` for ``which`` in
    ``{"eq13", "eq14"}`` (the output-directional and input-directional bounds).
    """
    if which not in ("eq13", "eq14"):
        raise ValueError(f"unknown bound {which!r}")
    t0 = time.perf_counter()
    cor = corollary1_verify(sys, x0, u, K_u, rank_rtol, psd_rtol, seed)
    if cor.verdict is Verdict.INAPPLICABLE:
        return _inapplicable(which, cor.reason, cor.context, t0)
    u = as_signal(u, sys.m)
    K = DEFAULT_KU_FRACTION * pe_gram(u, sys.n + 1) if K_u is None else sym(K_u)
    if which == "eq13":
        bound = directional_bound_output(sys, K)
    else:
        bound = directional_bound_input(sys, K, rank_rtol)
    steps = {
        "bound_below_cor1": lambda_min(cor.rhs - bound),
        "cor1_below_gram": cor.margin,
    }
    step_tols = {
        "bound_below_cor1": psd_tolerance(cor.rhs, bound, psd_rtol),
        "cor1_below_gram": cor.tol,
    }
    ctx = dict(cor.context)
    ctx["bound_lambda_max"] = lambda_max(bound)
    return _finish(which, cor.lhs, bound, steps, step_tols, ctx, t0, psd_rtol)


def corollary2_verify(
    sys: LtiSystem,
    x0,
    u,
    r: int | None = None,
    rank_rtol: float = DEFAULT_RANK_RTOL,
    psd_rtol: float = DEFAULT_PSD_RTOL,
    seed: int | None = None,
) -> BoundReport:
    """Relaxed-order PE: vanishing leading Markov parameters lower the input
    order needed for a PE output to ``n + 1 - r``.

    The headline margin is ``lambda_min`` of the output Gram; the verdict is
    the rank-PE statement (output Gram of rank ``p``). The relaxed
    representation ``M u_[k-n,k] = Mbar_r u_[k-n,k-r]`` is checked on every
    window.
    """
    t0 = time.perf_counter()
    name = "cor2"
    u = as_signal(u, sys.m)
    n, N = sys.n, u.shape[0]
    r_true = relative_degree(sys)
    r = r_true if r is None else r
    ctx = _context(sys, u, seed=seed, r=r)
    if r != r_true or r > n:
        return _inapplicable(name, f"leading Markov parameters do not vanish up to r={r}", ctx, t0)
    if not is_output_reachable(sys, rank_rtol):
        return _inapplicable(name, "system is not output reachable", ctx, t0)
    if N - r < n + 1 - r or not pe_order_check(u[:N - r], n + 1 - r, rank_rtol):
        return _inapplicable(name, f"input prefix is not PE of order {n + 1 - r}", ctx, t0)
    _, y = simulate(sys, x0, u)
    Mbar, _ = build_relaxed_M(sys, r)
    full = build_M(sys) @ hankel(u, n + 1)
    relaxed = Mbar @ hankel(u[:N - r], n + 1 - r)
    resid = float(np.max(np.abs(full - relaxed), initial=0.0))
    lhs = sym(y.T @ y)
    rank_y = numerical_rank(y, rank_rtol)
    margin = lambda_min(lhs)
    scale = 1.0 + float(np.max(np.abs(u)))
    ident_tol = 1e-10 * scale * (1.0 + float(np.max(np.abs(Mbar), initial=0.0)))
    ok = rank_y == sys.p and resid <= ident_tol
    ctx["output_rank"] = rank_y
    return BoundReport(
        name=name,
        verdict=Verdict.HOLDS if ok else Verdict.FAILS,
        margin=margin,
        tol=0.0,
        lhs=lhs,
        rhs=np.zeros_like(lhs),
        steps={"relaxed_identity_residual": -resid},
        context=ctx,
        timings={"total_s": time.perf_counter() - t0},
    )


def state_input_matrix(x, u, L: int) -> np.ndarray:
    """``[H_1(x_[0,N-L]); H_L(u)]``: column ``k`` is ``[x_k; u_[k,k+L-1]]``."""
    u = as_signal(u)
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    N = u.shape[0]
    if x.shape[0] != N:
        raise ValueError(f"state length {x.shape[0]} differs from input length {N}")
    Hu = hankel(u, L)
    return np.vstack([x[:N - L + 1].T, Hu])


def _theorem3_core(sys, x0, u, L, K_u, rank_rtol, psd_rtol):
    """Shared pieces of the state-input bound: ``(lhs, Z, K, steps, step_tols)``
    or a string describing the unmet hypothesis."""
    n, m = sys.n, sys.m
    N = u.shape[0]
    if L < 1:
        raise ValueError("depth L must be positive")
    if N < L + n:
        raise ValueError(f"need N >= L + n = {L + n}")
    size = m * (L + n)
    G = pe_gram(u, L + n)
    K = DEFAULT_KU_FRACTION * G if K_u is None else sym(np.atleast_2d(K_u))
    if K.shape != (size, size):
        raise ValueError(f"K_u must be {(size, size)}, got {K.shape}")
    if not is_controllable(sys, rank_rtol):
        return "(A, B) is not controllable"
    if lambda_min(G - K) < -psd_tolerance(G, K, psd_rtol):
        return f"input is not K_u-PE of order {L + n}"
    x, _ = simulate(sys, x0, u)
    X = state_input_matrix(x, u, L)
    lhs = sym(X @ X.T)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RankDeficiencyWarning)
        Z = build_Z(sys, L, rank_rtol)
    d = annihilating_polynomial(sys)
    count = N - L - n + 1
    # [Phi_k; U_k] are consecutive columns of X, so [Phi_k; U_k] d is a
    # d-weighted sum of shifted column blocks
    Xd = _combine(d, X.T, count).T
    ZU = Z @ hankel(u, L + n)
    TI = np.kron(build_T(d, L), np.eye(m))
    bottom = TI @ hankel(u[1:], L + n - 1)[:, :count] if L > 1 else np.zeros((0, count))
    S3 = np.zeros_like(lhs)
    for i in range(n + 1):
        seg = X[:, i:i + count]
        S3 += seg @ seg.T
    S2 = Xd @ Xd.T
    ZGZ = sym(Z @ G @ Z.T)
    ZKZ = sym(Z @ K @ Z.T)
    scale = 1.0 + float(np.max(np.abs(X)))
    steps = {
        "window_gram_dominates_K": lambda_min(ZGZ - ZKZ),
        "shift_identity_residual": -float(np.max(np.abs(Xd[n + m:] - bottom), initial=0.0)),
        "window_identity_residual": -float(np.max(np.abs(Xd - ZU), initial=0.0)),
        "gram_identity_residual": -float(np.max(np.abs(ZGZ - S2), initial=0.0)),
        "unit_norm_d": lambda_min(S3 - S2),
        "window_overlap": lambda_min((n + 1) * lhs - S3),
    }
    step_tols = {
        "window_gram_dominates_K": psd_tolerance(ZGZ, ZKZ, psd_rtol),
        "shift_identity_residual": 1e-9 * scale,
        "window_identity_residual": 1e-9 * scale,
        "gram_identity_residual": 1e-8 * scale**2 * max(count, 1),
        "unit_norm_d": psd_tolerance(S3, S2, psd_rtol),
        "window_overlap": psd_tolerance((n + 1) * lhs, S3, psd_rtol),
    }
    return lhs, Z, K, steps, step_tols


def theorem3_verify(
    sys: LtiSystem,
    x0,
    u,
    L: int,
    K_u=None,
    rank_rtol: float = DEFAULT_RANK_RTOL,
    psd_rtol: float = DEFAULT_PSD_RTOL,
    seed: int | None = None,
) -> BoundReport:
    """State-input data Gram versus ``Z K_u Z^T / (n+1)`` for an input that is
    ``K_u``-PE of order ``L + n``."""
    t0 = time.perf_counter()
    name = "thm3"
    u = as_signal(u, sys.m)
    ctx = _context(sys, u, seed=seed, L=L)
    core = _theorem3_core(sys, x0, u, L, K_u, rank_rtol, psd_rtol)
    if isinstance(core, str):
        return _inapplicable(name, core, ctx, t0)
    lhs, Z, K, steps, step_tols = core
    rhs = sym(Z @ K @ Z.T) / (sys.n + 1)
    return _finish(name, lhs, rhs, steps, step_tols, ctx, t0, psd_rtol)


def robust_bound_verify(
    sys: LtiSystem,
    x0,
    u,
    L: int,
    K_u,
    Zhat,
    eps: float,
    rank_rtol: float = DEFAULT_RANK_RTOL,
    psd_rtol: float = DEFAULT_PSD_RTOL,
    seed: int | None = None,
) -> BoundReport:
    """Bound built from a perturbed ``Zhat`` with ``|Zhat - Z|_2 < eps``:
    ``Zhat K_u Zhat^T / (2(n+1)) - eps^2 sigma_max(K_u) / (n+1) * I``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    t0 = time.perf_counter()
    name = "robust"
    u = as_signal(u, sys.m)
    ctx = _context(sys, u, seed=seed, L=L, eps=float(eps))
    core = _theorem3_core(sys, x0, u, L, K_u, rank_rtol, psd_rtol)
    if isinstance(core, str):
        return _inapplicable(name, core, ctx, t0)
    lhs, Z, K, steps, step_tols = core
    Zhat = np.asarray(Zhat, dtype=float)
    if Zhat.shape != Z.shape:
        raise ValueError(f"Zhat must be {Z.shape}, got {Zhat.shape}")
    err = float(singular_values(Zhat - Z)[0]) if Z.size else 0.0
    ctx["model_error"] = err
    if not err < eps:
        return _inapplicable(name, f"|Zhat - Z|_2 = {err:.3g} is not below eps", ctx, t0)
    n1 = sys.n + 1
    smax = float(singular_values(K)[0]) if K.size else 0.0
    rhs = sym(Zhat @ K @ Zhat.T) / (2 * n1) - eps**2 / n1 * smax * np.eye(lhs.shape[0])
    nominal = sym(Z @ K @ Z.T) / n1
    steps["robust_below_nominal"] = lambda_min(nominal - rhs)
    step_tols["robust_below_nominal"] = psd_tolerance(nominal, rhs, psd_rtol)
    reason = "weak certificate: bound is not positive definite" if lambda_min(rhs) <= 0 else ""
    return _finish(name, lhs, rhs, steps, step_tols, ctx, t0, psd_rtol, reason)


def design_input_gain(sys: LtiSystem, K_y_target) -> float:
    """Smallest ``k_u`` with ``k_u / (n+1) * M M^T >= K_y_target``.

    Any input that is ``(k_u I)``-PE of order ``n+1`` then produces an output
    Gram dominating ``K_y_target`` for every initial state.
    """
    Ky = sym(np.atleast_2d(K_y_target))
    if Ky.shape != (sys.p, sys.p):
        raise ValueError(f"K_y must be {(sys.p, sys.p)}, got {Ky.shape}")
    M = build_M(sys)
    try:
        W = inv_sqrt_psd(M @ M.T)
    except np.linalg.LinAlgError:
        raise ValueError("M is row-rank deficient; no finite input gain exists") from None
    return (sys.n + 1) * max(lambda_max(W @ Ky @ W), 0.0)
