"""Data-based trajectory parametrization and the necessity counterexample."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bounds import state_input_matrix
from .linalg import DEFAULT_RANK_RTOL, numerical_rank, singular_values
from .lti import (
    LtiSystem,
    annihilating_polynomial,
    as_signal,
    markov_parameters,
    observability_matrix,
    simulate,
    toeplitz_io_matrix,
)
from .pe import hankel
from .structmat import build_M

__all__ = [
    "TrajectorySpaceBasis",
    "CounterexampleReport",
    "io_data_matrix",
    "rank_condition_check",
    "trajectory_space_basis",
    "image_ranks",
    "image_equality_check",
    "parametrize",
    "counterexample_system",
    "counterexample_run",
]


def io_data_matrix(u, y, L: int) -> np.ndarray:
    """``[H_L(u); H_L(y)]``."""
    u, y = as_signal(u), as_signal(y)
    if u.shape[0] != y.shape[0]:
        raise ValueError("input and output lengths differ")
    return np.vstack([hankel(u, L), hankel(y, L)])


def rank_condition_check(x, u, L: int, tol: float = DEFAULT_RANK_RTOL) -> tuple[bool, float]:
    """Does ``[H_1(x_[0,N-L]); H_L(u)]`` have rank ``mL + n``?

    Also returns the smallest singular value (zero when the matrix is wider
    than tall in the wrong direction).
    """
    u = as_signal(u)
    X = state_input_matrix(x, u, L)
    rows, cols = X.shape
    s = singular_values(X)
    smin = float(s[-1]) if cols >= rows and s.size else 0.0
    return numerical_rank(X, tol) == rows, smin


@dataclass(frozen=True)
class TrajectorySpaceBasis:
    """``W = [[I, 0], [T_L, O_L]]``: maps ``(u_bar, x0_bar)`` to ``[u_bar; y_bar]``."""

    W: np.ndarray
    L: int
    n: int
    m: int
    p: int

    def split(self, coeffs) -> tuple[np.ndarray, np.ndarray]:
        """Split a coefficient vector into ``(u_bar as (L, m), x0_bar)``."""
        coeffs = np.asarray(coeffs, dtype=float)
        mL = self.m * self.L
        return coeffs[:mL].reshape(self.L, self.m), coeffs[mL:]


def trajectory_space_basis(sys: LtiSystem, L: int) -> TrajectorySpaceBasis:
    n, m, p = sys.dims
    mL = m * L
    W = np.zeros((mL + p * L, mL + n))
    W[:mL, :mL] = np.eye(mL)
    W[mL:, :mL] = toeplitz_io_matrix(sys, L)
    W[mL:, mL:] = observability_matrix(sys, L)
    return TrajectorySpaceBasis(W=W, L=L, n=n, m=m, p=p)


def image_ranks(H: np.ndarray, W: np.ndarray, tol: float = DEFAULT_RANK_RTOL):
    """``(rank H, rank W, rank [H | W])``."""
    return (
        numerical_rank(H, tol),
        numerical_rank(W, tol),
        numerical_rank(np.hstack([H, W]), tol),
    )


def image_equality_check(sys: LtiSystem, x0, u, L: int, tol: float = DEFAULT_RANK_RTOL) -> bool:
    """Is the column space of the measured ``[H_L(u); H_L(y)]`` exactly the set
    of length-``L`` trajectories of ``sys``?"""
    u = as_signal(u, sys.m)
    _, y = simulate(sys, x0, u)
    H = io_data_matrix(u, y, L)
    W = trajectory_space_basis(sys, L).W
    rH, rW, rHW = image_ranks(H, W, tol)
    return rH == rW == rHW


def parametrize(u_data, y_data, L: int, target_u, target_y) -> tuple[np.ndarray, float]:
    """Least-squares ``g`` with ``[H_L(u); H_L(y)] g ~= [u_bar; y_bar]``.

    Returns ``(g, residual)`` with the residual as a Euclidean norm.
    """
    H = io_data_matrix(u_data, y_data, L)
    tu = as_signal(target_u).reshape(-1)
    ty = as_signal(target_y).reshape(-1)
    rhs = np.concatenate([tu, ty])
    if rhs.size != H.shape[0]:
        raise ValueError(f"target has {rhs.size} entries, expected {H.shape[0]}")
    g, *_ = np.linalg.lstsq(H, rhs, rcond=None)
    return g, float(np.linalg.norm(H @ g - rhs))


# -- counterexample --------------------------------------------------------

COUNTEREXAMPLE_PROBES = ((0.0, 0.0), (1.0, 2.0), (-3.0, 5.0))


def counterexample_system() -> LtiSystem:
    """Double-integrator-like chain ``x1+ = u``, ``x2+ = x1`` with full state output."""
    return LtiSystem(
        A=[[0.0, 0.0], [1.0, 0.0]],
        B=[[1.0], [0.0]],
        C=np.eye(2),
        D=np.zeros((2, 1)),
    )


@dataclass
class CounterexampleReport:
    N: int
    d: np.ndarray
    M: np.ndarray
    Mu_first: np.ndarray
    Mu_rest_max: float
    mu_gram: np.ndarray
    mu_gram_rank: int
    probes: list[dict] = field(default_factory=list)
    direction: np.ndarray | None = None
    observability_rank: int = 0
    realization_order: int = 0
    reduced_outputs: tuple[float, float] = (0.0, 0.0)
    falsified: bool = False

    @property
    def verdict(self) -> str:
        if self.falsified:
            return "necessity claim falsified"
        return "counterexample not reproduced"

    def to_record(self) -> dict:
        return {
            "verdict": self.verdict,
            "N": self.N,
            "d": self.d.tolist(),
            "M": self.M.tolist(),
            "Mu_first": self.Mu_first.tolist(),
            "Mu_rest_max": self.Mu_rest_max,
            "mu_gram": self.mu_gram.tolist(),
            "mu_gram_rank": self.mu_gram_rank,
            "probes": self.probes,
            "direction": None if self.direction is None else self.direction.tolist(),
            "observability_rank": self.observability_rank,
            "realization_order": self.realization_order,
            "reduced_outputs": list(self.reduced_outputs),
            "note": (
                "rank(H_1(y)) = 2 for every x0: columns 1 and 2 are [1; x0(1)] and "
                "[0; 1], which are independent regardless of x0"
            ),
        }

    def table(self) -> str:
        lines = [
            f"{'x0':>14} | {'rank H_1(y)':>11}",
            "-" * 28,
        ]
        for pr in self.probes:
            x0 = "[" + ", ".join(f"{v:g}" for v in pr["x0"]) + "]"
            lines.append(f"{x0:>14} | {pr['rank']:>11}")
        lines += [
            "",
            f"d                      = {self.d.tolist()}",
            f"M                      = {self.M.tolist()}",
            f"M u_[0,2]              = {self.Mu_first.tolist()}",
            f"max |M u_[k-2,k]|, k>2 = {self.Mu_rest_max:g}",
            f"rank Gram{{M u}}         = {self.mu_gram_rank} (needs 2)",
            f"rank obsv(A, a^T C)    = {self.observability_rank} (n = 2)",
            f"reduced order n~       = {self.realization_order}",
            f"a^T y_0, a^T y_1       = {self.reduced_outputs}",
            f"verdict: {self.verdict}",
        ]
        return "\n".join(lines)


def counterexample_run(N: int = 6, probes=COUNTEREXAMPLE_PROBES, tol: float = 1e-12) -> CounterexampleReport:
    """Impulse input on :func:`counterexample_system`.

    The output is PE of order 1 for every probed initial state while
    ``{M u_[k-n,k]}`` is not, so PE of that sequence is not necessary.
    """
    if N < 4:
        raise ValueError("need N >= 4 to expose the structure")
    sys = counterexample_system()
    n = sys.n
    u = np.zeros((N, 1))
    u[0, 0] = 1.0
    d = annihilating_polynomial(sys)
    M = build_M(sys)
    MU = M @ hankel(u, n + 1)
    gram = MU @ MU.T
    mu_rank = numerical_rank(MU)

    records = []
    all_full = True
    for x0 in probes:
        _, y = simulate(sys, x0, u)
        H1 = y.T
        rank = numerical_rank(H1)
        all_full &= rank == 2
        records.append({"x0": list(map(float, x0)), "H1_y": H1.tolist(), "rank": rank})

    # direction annihilating every M u window
    w, V = np.linalg.eigh(gram)
    a = V[:, 0]
    a = a * np.sign(a[np.argmax(np.abs(a))])
    aC = a @ sys.C
    scalar_out = LtiSystem(sys.A, sys.B, aC[None, :], (a @ sys.D)[None, :])
    obs_rank = numerical_rank(observability_matrix(scalar_out, n))
    # order of a minimal realization of u -> a^T y = rank of the Markov Hankel
    h = [float(a @ blk.reshape(-1)) for blk in markov_parameters(sys, 2 * n + 1).blocks[1:]]
    hank = np.array([[h[i + j] for j in range(n)] for i in range(n)])
    n_red = numerical_rank(hank)
    # pick x0 that zeroes a^T y_0; a^T y_1 then stays fixed by the input
    x0_red = np.linalg.lstsq(aC[None, :], np.atleast_1d(-(a @ sys.D) @ u[0]), rcond=None)[0]
    _, y_red = simulate(sys, x0_red, u)
    reduced = (float(a @ y_red[0]), float(a @ y_red[1]))

    Mu_first = MU[:, 0]
    Mu_rest = float(np.max(np.abs(MU[:, 1:]), initial=0.0))
    falsified = bool(
        all_full
        and mu_rank < sys.p
        and np.allclose(Mu_first, [0.0, 1.0], atol=tol, rtol=0)
        and Mu_rest <= tol
    )
    return CounterexampleReport(
        N=N,
        d=d,
        M=M,
        Mu_first=Mu_first,
        Mu_rest_max=Mu_rest,
        mu_gram=gram,
        mu_gram_rank=numerical_rank(gram),
        probes=records,
        direction=a,
        observability_rank=obs_rank,
        realization_order=n_red,
        reduced_outputs=reduced,
        falsified=falsified,
    )
