"""Discrete-time LTI systems and the model quantities the PE bounds consume.

Signals are plain ``(N, q)`` float arrays: row ``k`` is the sample ``u_k``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import numerical_rank

__all__ = [
    "LtiSystem",
    "MarkovParameters",
    "as_signal",
    "simulate",
    "markov_parameters",
    "annihilating_polynomial",
    "controllability_matrix",
    "is_controllable",
    "is_output_reachable",
    "extend_to_state_output",
    "relative_degree",
    "observability_matrix",
    "toeplitz_io_matrix",
    "delay_input",
]


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LtiSystem:
    """State-space quadruple ``x+ = A x + B u``, ``y = C x + D u``.

    ``n = 0`` is allowed and describes the static map ``y = D u``. Matrices are
    stored as read-only float arrays.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        A, B, C, D = (_frozen(M) for M in (self.A, self.B, self.C, self.D))
        if D.ndim != 2:
            raise ValueError("D must be a 2-D array")
        p, m = D.shape
        n = A.shape[0] if A.ndim == 2 else 0
        # allow empty placeholders for the static case
        if A.size == 0:
            n = 0
            A = _frozen(np.zeros((0, 0)))
        if B.size == 0 and n == 0:
            B = _frozen(np.zeros((0, m)))
        if C.size == 0 and n == 0:
            C = _frozen(np.zeros((p, 0)))
        if A.shape != (n, n):
            raise ValueError(f"A must be square, got {A.shape}")
        if B.shape != (n, m):
            raise ValueError(f"B must be {(n, m)}, got {B.shape}")
        if C.shape != (p, n):
            raise ValueError(f"C must be {(p, n)}, got {C.shape}")
        if m < 1 or p < 1:
            raise ValueError("need at least one input and one output")
        for name, M in zip("ABCD", (A, B, C, D)):
            if not np.all(np.isfinite(M)):
                raise ValueError(f"{name} has non-finite entries")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def p(self) -> int:
        return self.C.shape[0]

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.n, self.m, self.p


@dataclass(frozen=True)
class MarkovParameters:
    """Impulse-response blocks ``[D, CB, CAB, ..., C A^(n-1) B]``."""

    blocks: tuple[np.ndarray, ...]

    @property
    def stacked(self) -> np.ndarray:
        return np.hstack(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def __getitem__(self, j: int) -> np.ndarray:
        return self.blocks[j]


def as_signal(values, q: int | None = None) -> np.ndarray:
    """Coerce ``values`` to an ``(N, q)`` float array and validate it.

    A 1-D input is read as a scalar signal (``q = 1``).
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"signal must be 1-D or 2-D, got ndim={arr.ndim}")
    if arr.shape[0] < 1:
        raise ValueError("signal must have at least one sample")
    if q is not None and arr.shape[1] != q:
        raise ValueError(f"signal has dimension {arr.shape[1]}, expected {q}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("signal has non-finite entries")
    return arr


def simulate(sys: LtiSystem, x0, u) -> tuple[np.ndarray, np.ndarray]:
    """Run the state recursion from ``x0`` under input ``u``.

    Returns:
        ``(x, y)`` with shapes ``(N, n)`` and ``(N, p)``; ``x[0] == x0``.
    """
    u = as_signal(u, sys.m)
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.shape != (sys.n,):
        raise ValueError(f"x0 must have length {sys.n}, got {x0.shape[0]}")
    N = u.shape[0]
    x = np.empty((N, sys.n))
    xk = x0.copy()
    for k in range(N):
        x[k] = xk
        xk = sys.A @ xk + sys.B @ u[k]
    y = x @ sys.C.T + u @ sys.D.T
    return x, y


def markov_parameters(sys: LtiSystem, count: int | None = None) -> MarkovParameters:
    """First ``count`` Markov parameters (default ``n + 1``)."""
    count = sys.n + 1 if count is None else count
    blocks = [sys.D.copy()]
    AkB = sys.B.copy()
    for _ in range(1, count):
        blocks.append(sys.C @ AkB)
        AkB = sys.A @ AkB
    return MarkovParameters(tuple(_frozen(b) for b in blocks[:count]))


def annihilating_polynomial(sys_or_A) -> np.ndarray:
    """Unit-norm characteristic polynomial coefficients of ``A``.

    The vector is ordered ``[d_n, ..., d_1, d_0]`` where ``d(z) = sum_j d_j
    z^(n-j)``; equivalently it lists coefficients by ascending power of ``z``.
    Computed with the Faddeev-LeVerrier recursion, so ``d_0`` is the leading
    coefficient and never vanishes.
    """
    A = sys_or_A.A if isinstance(sys_or_A, LtiSystem) else np.asarray(sys_or_A, float)
    n = A.shape[0]
    # c[j] is the coefficient of z^(n-j); c[0] = 1 (monic)
    c = np.zeros(n + 1)
    c[0] = 1.0
    Mk = np.zeros((n, n))
    eye = np.eye(n)
    for k in range(1, n + 1):
        Mk = A @ Mk + c[k - 1] * eye
        c[k] = -np.trace(A @ Mk) / k
    d = c[::-1] / np.linalg.norm(c)
    return d + 0.0  # drop signed zeros


def controllability_matrix(sys: LtiSystem) -> np.ndarray:
    blocks = []
    AkB = sys.B
    for _ in range(sys.n):
        blocks.append(AkB)
        AkB = sys.A @ AkB
    if not blocks:
        return np.zeros((0, 0))
    return np.hstack(blocks)


def is_controllable(sys: LtiSystem, tol: float = 1e-10) -> bool:
    if sys.n == 0:
        return True
    return numerical_rank(controllability_matrix(sys), tol) == sys.n


def is_output_reachable(sys: LtiSystem, tol: float = 1e-10) -> bool:
    """Full row rank of the stacked Markov parameters ``[D CB ... CA^(n-1)B]``."""
    return numerical_rank(markov_parameters(sys).stacked, tol) == sys.p


def _state_output(sys: LtiSystem) -> LtiSystem:
    n, m = sys.n, sys.m
    C_ext = np.vstack([np.eye(n), np.zeros((m, n))])
    D_ext = np.vstack([np.zeros((n, m)), np.eye(m)])
    return LtiSystem(sys.A, sys.B, C_ext, D_ext)


def extend_to_state_output(sys: LtiSystem) -> LtiSystem:
    """System with the same dynamics whose output is ``[x_k; u_k]``."""
    if sys.n == 0:
        raise ValueError("state-output extension needs n >= 1")
    return _state_output(sys)


def relative_degree(sys: LtiSystem, tol: float = 1e-12) -> int:
    """Index of the first Markov parameter with norm above ``tol``.

    ``tol`` is relative to the largest block norm (floored at 1). Returns
    ``n + 1`` when every block vanishes.
    """
    blocks = markov_parameters(sys).blocks
    norms = [np.linalg.norm(b, 2) if b.size else 0.0 for b in blocks]
    thresh = tol * max(1.0, max(norms))
    for r, nrm in enumerate(norms):
        if nrm > thresh:
            return r
    return sys.n + 1


def observability_matrix(sys: LtiSystem, L: int) -> np.ndarray:
    """``[C; CA; ...; CA^(L-1)]`` with shape ``(pL, n)``."""
    rows = []
    CAk = sys.C
    for _ in range(L):
        rows.append(CAk)
        CAk = CAk @ sys.A
    return np.vstack(rows) if rows else np.zeros((0, sys.n))


def toeplitz_io_matrix(sys: LtiSystem, L: int) -> np.ndarray:
    """Block lower-triangular Toeplitz map from ``u_[0,L-1]`` to ``y_[0,L-1]``."""
    m, p = sys.m, sys.p
    blocks = markov_parameters(sys, count=L).blocks
    T = np.zeros((p * L, m * L))
    for i in range(L):
        for j in range(i + 1):
            T[i * p:(i + 1) * p, j * m:(j + 1) * m] = blocks[i - j]
    return T


def delay_input(sys: LtiSystem, r: int) -> LtiSystem:
    """Series connection of an ``r``-step input delay line with ``sys``.

    The result has ``n + r m`` states and Markov parameters shifted by ``r``:
    the first ``r`` vanish exactly and the ``r``-th equals the original ``D``.
    """
    if r < 0:
        raise ValueError("delay must be nonnegative")
    if r == 0:
        return sys
    n, m, p = sys.dims
    nb = n + r * m
    A = np.zeros((nb, nb))
    B = np.zeros((nb, m))
    C = np.zeros((p, nb))
    A[:n, :n] = sys.A
    last = slice(n + (r - 1) * m, nb)
    A[:n, last] = sys.B
    for i in range(1, r):
        A[n + i * m:n + (i + 1) * m, n + (i - 1) * m:n + i * m] = np.eye(m)
    B[n:n + m] = np.eye(m)
    C[:, :n] = sys.C
    C[:, last] = sys.D
    return LtiSystem(A, B, C, np.zeros((p, m)))
