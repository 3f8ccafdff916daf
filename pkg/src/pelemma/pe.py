"""Hankel matrices and persistence of excitation, rank-based and quantitative."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    DEFAULT_PSD_RTOL,
    DEFAULT_RANK_RTOL,
    lambda_min,
    numerical_rank,
    psd_tolerance,
    sym,
)
from .lti import as_signal

__all__ = [
    "PeCertificate",
    "hankel",
    "pe_order_check",
    "pe_gram",
    "window_gram",
    "kpe_check",
    "psd_dominates",
]


@dataclass(frozen=True)
class PeCertificate:
    """Outcome of a ``K``-PE test of a given order.

    ``margin`` is ``lambda_min(gram - bound)``, or ``lambda_min(gram)`` when no
    bound was supplied.
    """

    order: int
    gram: np.ndarray
    bound: np.ndarray | None
    margin: float
    tol: float

    @property
    def holds(self) -> bool:
        return self.margin >= -self.tol


def hankel(u, L: int) -> np.ndarray:
    """Depth-``L`` block Hankel matrix of shape ``(qL, N - L + 1)``.

    Column ``j`` is the stacked window ``u_[j, j+L-1]``.

    >>> hankel([1, 2, 3], 2)
    array([[1., 2.],
           [2., 3.]])
    """
    u = as_signal(u)
    N, q = u.shape
    if L < 1:
        raise ValueError("depth L must be positive")
    if N < L:
        raise ValueError(f"signal length {N} is shorter than depth {L}")
    cols = N - L + 1
    H = np.empty((q * L, cols))
    for i in range(L):
        H[i * q:(i + 1) * q, :] = u[i:i + cols].T
    return H


def window_gram(u, L: int) -> np.ndarray:
    """Gram matrix as the explicit sum of window outer products."""
    u = as_signal(u)
    N, q = u.shape
    if N < L:
        raise ValueError(f"signal length {N} is shorter than depth {L}")
    G = np.zeros((q * L, q * L))
    for k in range(N - L + 1):
        w = u[k:k + L].reshape(-1)
        G += np.outer(w, w)
    return G


def pe_gram(u, L: int, verify: bool = False) -> np.ndarray:
    """``H_L(u) H_L(u)^T``.

    With ``verify=True`` the window-sum form is also computed and the two must
    agree to ``1e-12`` relative, otherwise ``ArithmeticError`` is raised.
    """
    H = hankel(u, L)
    G = sym(H @ H.T)
    if verify:
        G2 = window_gram(u, L)
        scale = max(1.0, float(np.max(np.abs(G))))
        if np.max(np.abs(G - G2), initial=0.0) > 1e-12 * scale:
            raise ArithmeticError("product and window-sum Gram disagree")
    return G


def pe_order_check(u, L: int, tol: float = DEFAULT_RANK_RTOL) -> bool:
    """Rank test: ``rank(H_L(u)) == qL``."""
    H = hankel(u, L)
    return numerical_rank(H, tol) == H.shape[0]


def psd_dominates(A, B, tol: float | None = None) -> tuple[bool, float]:
    """Test ``A >= B`` in the PSD order.

    Returns ``(verdict, lambda_min(sym(A - B)))``. When ``tol`` is None the
    slack is ``1e-9 * (|tr A| + |tr B| + 1)``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape != B.shape or A.shape[0] != A.shape[1]:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    if tol is None:
        tol = psd_tolerance(A, B, DEFAULT_PSD_RTOL)
    margin = lambda_min(A - B)
    return margin >= -tol, margin


def kpe_check(u, L: int, K, tol: float | None = None) -> PeCertificate:
    u = as_signal(u)
    q = u.shape[1]
    K = np.atleast_2d(np.asarray(K, dtype=float))
    if K.shape != (q * L, q * L):
        raise ValueError(f"K must be {(q * L, q * L)}, got {K.shape}")
    if not np.allclose(K, K.T, rtol=0, atol=1e-12 * max(1.0, np.max(np.abs(K)))):
        raise ValueError("K must be symmetric")
    G = pe_gram(u, L, verify=True)
    if tol is None:
        tol = psd_tolerance(G, K)
    _, margin = psd_dominates(G, K, tol)
    return PeCertificate(order=L, gram=G, bound=sym(K), margin=margin, tol=tol)
