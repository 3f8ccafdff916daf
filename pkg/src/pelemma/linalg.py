"""Rank and PSD-order helpers shared by every module."""

from __future__ import annotations

import numpy as np

DEFAULT_RANK_RTOL = 1e-10
DEFAULT_PSD_RTOL = 1e-9


def singular_values(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return np.zeros(0)
    return np.linalg.svd(M, compute_uv=False)


def rank_threshold(M: np.ndarray, rtol: float = DEFAULT_RANK_RTOL) -> float:
    """Singular values strictly above this count towards the rank."""
    s = singular_values(M)
    if s.size == 0:
        return 0.0
    return rtol * s[0] * max(np.shape(M))


def numerical_rank(M: np.ndarray, rtol: float = DEFAULT_RANK_RTOL) -> int:
    s = singular_values(M)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rtol * s[0] * max(np.shape(M))))


def sym(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    return 0.5 * (M + M.T)


def lambda_min(M: np.ndarray) -> float:
    M = sym(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh(M)[0])


def lambda_max(M: np.ndarray) -> float:
    M = sym(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh(M)[-1])


def psd_tolerance(A: np.ndarray, B: np.ndarray, rtol: float = DEFAULT_PSD_RTOL) -> float:
    """Absolute eigenvalue slack ``rtol * (|tr A| + |tr B| + 1)``."""
    return rtol * (abs(np.trace(A)) + abs(np.trace(B)) + 1.0)


def inv_sqrt_psd(M: np.ndarray, rtol: float = DEFAULT_RANK_RTOL) -> np.ndarray:
    """``M^(-1/2)`` of a symmetric positive definite matrix."""
    w, V = np.linalg.eigh(sym(M))
    if w.size and w[0] <= rtol * max(w[-1], 0.0) * w.size:
        raise np.linalg.LinAlgError("matrix is not positive definite")
    return (V / np.sqrt(w)) @ V.T
