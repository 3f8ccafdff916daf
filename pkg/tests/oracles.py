"""Independent reference computations used as test oracles.

None of these call into the package; each is the most literal evaluation of
the quantity it checks.
"""

import itertools

import numpy as np


def recurrence(A, B, C, D, x0, u):
    """Step-by-step state recursion with explicit loops over entries."""
    A, B, C, D = (np.asarray(M, float) for M in (A, B, C, D))
    n, m, p = A.shape[0], B.shape[1], C.shape[0]
    x = [float(v) for v in np.reshape(x0, -1)]
    ys = []
    for uk in u:
        yk = [sum(C[i, j] * x[j] for j in range(n)) + sum(D[i, j] * uk[j] for j in range(m))
              for i in range(p)]
        ys.append(yk)
        x = [sum(A[i, j] * x[j] for j in range(n)) + sum(B[i, j] * uk[j] for j in range(m))
             for i in range(n)]
    return np.array(ys)


def markov_by_impulse(A, B, C, D, count):
    """Markov blocks read off the impulse response, one input channel at a time."""
    A, B, C, D = (np.asarray(M, float) for M in (A, B, C, D))
    m = B.shape[1]
    blocks = [np.zeros_like(D) for _ in range(count)]
    for j in range(m):
        u = np.zeros((count, m))
        u[0, j] = 1.0
        y = recurrence(A, B, C, D, np.zeros(A.shape[0]), u)
        for k in range(count):
            blocks[k][:, j] = y[k]
    return blocks


def charpoly_via_eigs(A):
    """Monic characteristic polynomial from eigenvalues, ascending powers."""
    c = np.real(np.poly(np.asarray(A, float)))  # descending, monic
    return c[::-1]


def poly_residual(d, A):
    """``sum_i d[i] A^i`` (ascending coefficients) by repeated multiplication."""
    A = np.asarray(A, float)
    out = np.zeros_like(A)
    P = np.eye(A.shape[0])
    for di in d:
        out += di * P
        P = P @ A
    return out


def pbh_controllable(A, B, rtol=1e-9):
    A, B = np.asarray(A, float), np.asarray(B, float)
    n = A.shape[0]
    for lam in np.linalg.eigvals(A):
        Mat = np.hstack([lam * np.eye(n) - A, B])
        s = np.linalg.svd(Mat, compute_uv=False)
        if np.sum(s > rtol * max(1.0, s[0])) < n:
            return False
    return True


def svd_rank(M, rtol=1e-10):
    s = np.linalg.svd(np.asarray(M, float), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0] * max(np.shape(M))))


def hankel_by_definition(u, L):
    u = np.asarray(u, float)
    if u.ndim == 1:
        u = u[:, None]
    N, q = u.shape
    H = np.zeros((q * L, N - L + 1))
    for i, j, c in itertools.product(range(L), range(N - L + 1), range(q)):
        H[i * q + c, j] = u[i + j, c]
    return H


def m_by_summation(d, blocks):
    """``M_j = sum_q d_(j-q) Gamma_q``, ``d`` as ``[d_n .. d_0]``."""
    n = len(d) - 1
    dj = {j: d[n - j] for j in range(n + 1)}
    cols = []
    for j in range(n, -1, -1):
        cols.append(sum(dj[j - q] * blocks[q] for q in range(j + 1)))
    return np.hstack(cols)
