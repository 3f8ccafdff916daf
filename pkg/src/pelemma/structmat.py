"""Structured matrices derived from the annihilating polynomial and Markov parameters.

Conventions: ``d`` is ordered ``[d_n, ..., d_0]`` so ``d[i]`` holds ``d_(n-i)``.
``M = [M_n ... M_1 M_0]`` multiplies the window ``u_[k-n, k]``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_RANK_RTOL, numerical_rank
from .lti import (
    LtiSystem,
    MarkovParameters,
    _state_output,
    annihilating_polynomial,
    is_controllable,
    markov_parameters,
    relative_degree,
)

__all__ = [
    "RankDeficiencyWarning",
    "StructuredSet",
    "build_M",
    "build_M_from",
    "build_M_kron_d",
    "build_M_kron_Dbar",
    "build_Dbar",
    "build_Gammabar",
    "build_Gammabar_relaxed",
    "build_T",
    "build_Z",
    "build_relaxed_M",
    "structured_set",
]


class RankDeficiencyWarning(UserWarning):
    """A structured matrix expected to have full row rank does not."""


def _blocks(gamma) -> tuple[np.ndarray, ...]:
    if isinstance(gamma, MarkovParameters):
        return gamma.blocks
    return tuple(np.atleast_2d(np.asarray(g, dtype=float)) for g in gamma)


def build_M_from(d: np.ndarray, gamma) -> np.ndarray:
    """``M_j = sum_{q<=j} d_(j-q) Gamma_q`` laid out as ``[M_n ... M_0]``."""
    G = _blocks(gamma)
    n = len(d) - 1
    if len(G) != n + 1:
        raise ValueError(f"need {n + 1} Markov blocks, got {len(G)}")
    p, m = G[0].shape
    M = np.zeros((p, m * (n + 1)))
    for j in range(n + 1):
        Mj = np.zeros((p, m))
        for q in range(j + 1):
            # d_(j-q) sits at index n - (j - q)
            Mj += d[n - j + q] * G[q]
        col = n - j
        M[:, col * m:(col + 1) * m] = Mj
    return M


def build_M(sys: LtiSystem) -> np.ndarray:
    return build_M_from(annihilating_polynomial(sys), markov_parameters(sys))


def build_Dbar(d) -> np.ndarray:
    """Anti-triangular Hankel of coefficients: entry ``(i, j) = d_(n-i-j)``."""
    d = np.asarray(d, dtype=float).reshape(-1)
    n = d.size - 1
    Dbar = np.zeros((n + 1, n + 1))
    for i in range(n + 1):
        Dbar[i, :n + 1 - i] = d[i:]
    return Dbar


def _block_toeplitz_lower(G: tuple[np.ndarray, ...]) -> np.ndarray:
    size = len(G)
    p, m = G[0].shape
    out = np.zeros((p * size, m * size))
    for i in range(size):
        for j in range(i + 1):
            out[i * p:(i + 1) * p, j * m:(j + 1) * m] = G[i - j]
    return out


def build_Gammabar(gamma) -> np.ndarray:
    """Block lower-triangular Toeplitz matrix in ``Gamma_0 ... Gamma_n``."""
    return _block_toeplitz_lower(_blocks(gamma))


def build_Gammabar_relaxed(gamma, r: int) -> np.ndarray:
    """Same as :func:`build_Gammabar` but starting from ``Gamma_r``."""
    G = _blocks(gamma)
    n = len(G) - 1
    if not 0 <= r <= n:
        raise ValueError(f"relaxation index r={r} outside [0, {n}]")
    return _block_toeplitz_lower(G[r:])


def build_M_kron_d(d, gamma) -> np.ndarray:
    """``(d^T kron I_p) Gammabar``."""
    G = _blocks(gamma)
    p = G[0].shape[0]
    d = np.asarray(d, dtype=float).reshape(1, -1)
    return np.kron(d, np.eye(p)) @ build_Gammabar(G)


def build_M_kron_Dbar(d, gamma) -> np.ndarray:
    """``Gamma (Dbar kron I_m)``."""
    G = _blocks(gamma)
    m = G[0].shape[1]
    return np.hstack(G) @ np.kron(build_Dbar(d), np.eye(m))


def build_T(d, L: int) -> np.ndarray:
    """``(L-1) x (L+n-1)`` banded Toeplitz; row ``i`` is ``d`` shifted by ``i``.

    ``L = 1`` yields an empty ``0 x n`` matrix.
    """
    d = np.asarray(d, dtype=float).reshape(-1)
    n = d.size - 1
    if L < 1:
        raise ValueError("depth L must be positive")
    T = np.zeros((L - 1, L + n - 1))
    for i in range(L - 1):
        T[i, i:i + n + 1] = d
    return T


def build_Z(sys: LtiSystem, L: int, rtol: float = DEFAULT_RANK_RTOL) -> np.ndarray:
    """Block matrix mapping ``u_[k-n, k+L-1]`` to ``[Phi_k; U_k] d``.

    ``M`` is taken from the state-output system ``[x_k; u_k]``. The top block
    ``[M 0]`` and bottom block ``[0 T kron I_m]`` overlap in their column
    support, so ``Z`` has shape ``(n + mL) x m(L + n)``.

    Emits :class:`RankDeficiencyWarning` when ``(A, B)`` is not controllable,
    since ``Z`` then loses full row rank.
    """
    if L < 1:
        raise ValueError("depth L must be positive")
    n, m = sys.n, sys.m
    ext = _state_output(sys)
    d = annihilating_polynomial(sys)
    M = build_M(ext)
    TI = np.kron(build_T(d, L), np.eye(m))
    Z = np.zeros((n + m + m * (L - 1), m * (L + n)))
    Z[:n + m, :m * (n + 1)] = M
    Z[n + m:, m:] = TI
    if not is_controllable(sys, rtol):
        warnings.warn(
            "(A, B) is not controllable; Z is row-rank deficient",
            RankDeficiencyWarning,
            stacklevel=2,
        )
    return Z


def build_relaxed_M(sys: LtiSystem, r: int | None = None, tol: float = 1e-12):
    """Return ``(Mbar_r, dbar_r)`` for a system whose first ``r`` Markov
    parameters vanish.

    ``Mbar_r = (dbar_r^T kron I_p) Gammabar_r`` acts on ``u_[k-n, k-r]``.
    """
    r_true = relative_degree(sys, tol)
    if r is None:
        r = r_true
    if r > sys.n:
        raise ValueError("all Markov parameters vanish; no relaxation exists")
    if r != r_true:
        raise ValueError(
            f"Markov parameters do not vanish exactly up to r={r} "
            f"(first nonzero index is {r_true})"
        )
    d = annihilating_polynomial(sys)
    G = markov_parameters(sys)
    dbar = d[r:].copy()
    Gbar_r = build_Gammabar_relaxed(G, r)
    Mbar = np.kron(dbar.reshape(1, -1), np.eye(sys.p)) @ Gbar_r
    return Mbar, dbar


@dataclass(frozen=True)
class StructuredSet:
    """Everything derived from ``(d, Gamma)`` for one system."""

    d: np.ndarray
    M: np.ndarray
    Dbar: np.ndarray
    Gammabar: np.ndarray
    L: int | None = None
    T: np.ndarray | None = None
    Z: np.ndarray | None = None
    r: int | None = None
    Mbar_r: np.ndarray | None = None
    dbar_r: np.ndarray | None = None

    def z_row_rank(self, rtol: float = DEFAULT_RANK_RTOL) -> int | None:
        return None if self.Z is None else numerical_rank(self.Z, rtol)


def structured_set(sys: LtiSystem, L: int | None = None) -> StructuredSet:
    d = annihilating_polynomial(sys)
    G = markov_parameters(sys)
    T = Z = None
    if L is not None:
        T = build_T(d, L)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RankDeficiencyWarning)
            Z = build_Z(sys, L)
    r = relative_degree(sys)
    Mbar = dbar = None
    if r <= sys.n:
        Mbar, dbar = build_relaxed_M(sys, r)
    return StructuredSet(
        d=d,
        M=build_M_from(d, G),
        Dbar=build_Dbar(d),
        Gammabar=build_Gammabar(G),
        L=L,
        T=T,
        Z=Z,
        r=r if r <= sys.n else None,
        Mbar_r=Mbar,
        dbar_r=dbar,
    )
