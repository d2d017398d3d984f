"""Small dense-polynomial toolkit for the 16-term cubic and its elimination matrix.

Trivariate polynomials are stored as dense arrays ``P[i, j, k]`` holding the
coefficient of ``x^i y^j z^k``.
"""
from __future__ import annotations

from functools import lru_cache
from math import comb

import numpy as np
import scipy.linalg as sla

# exponents (i, j, k) of x^i y^j z^k, in coefficient-index order 0..15
MONOMIALS = (
    (2, 0, 1), (2, 0, 0), (1, 1, 1), (1, 1, 0), (1, 0, 2), (1, 0, 1), (1, 0, 0),
    (0, 2, 1), (0, 2, 0), (0, 1, 2), (0, 1, 1), (0, 1, 0),
    (0, 0, 3), (0, 0, 2), (0, 0, 1), (0, 0, 0),
)
MONOMIAL_NAMES = (
    "x^2 z", "x^2", "x y z", "x y", "x z^2", "x z", "x",
    "y^2 z", "y^2", "y z^2", "y z", "y", "z^3", "z^2", "z", "1",
)
_EXP = np.array(MONOMIALS)
_NONLINEAR = np.array([i + j + k > 1 for i, j, k in MONOMIALS])
DEG = 6  # dense buffer size per axis; enough for (quadratic) x (cubic) products


def monomial_matrix(p) -> np.ndarray:
    """Rows of the 16 monomials evaluated at points ``p`` of shape (..., 3)."""
    p = np.asarray(p, dtype=float)
    x, y, z = p[..., 0, None], p[..., 1, None], p[..., 2, None]
    return x ** _EXP[:, 0] * y ** _EXP[:, 1] * z ** _EXP[:, 2]


def to_dense(a, size: int = DEG) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    P = np.zeros(a.shape[:-1] + (size, size, size))
    for n, (i, j, k) in enumerate(MONOMIALS):
        P[..., i, j, k] = a[..., n]
    return P


def from_dense(P) -> np.ndarray:
    return np.stack([P[..., i, j, k] for i, j, k in MONOMIALS], axis=-1)


def _taylor(t, n: int) -> np.ndarray:
    """Matrix T with T[i, m] = C(i, m) t^(i-m), so that (u + t)^i = sum_m T[i, m] u^m."""
    t = np.asarray(t, dtype=float)
    T = np.zeros(t.shape + (n, n))
    for i in range(n):
        for m in range(i + 1):
            T[..., i, m] = comb(i, m) * t ** (i - m)
    return T


def shift_coefficients(a, p0) -> np.ndarray:
    """Coefficients of ``q -> g(q + p0)``; the 16-monomial support is preserved.

    Works on stacks: ``a`` (..., 16) and ``p0`` (..., 3).
    """
    a = np.asarray(a, dtype=float)
    p0 = np.broadcast_to(np.asarray(p0, dtype=float), a.shape[:-1] + (3,))
    P = to_dense(a, 4)
    Tx, Ty, Tz = (_taylor(p0[..., d], 4) for d in range(3))
    Q = np.einsum("...abc,...ai,...bj,...ck->...ijk", P, Tx, Ty, Tz)
    return from_dense(Q)


def mul(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    R = np.zeros_like(P)
    n = P.shape[0]
    for i, j, k in zip(*np.nonzero(P)):
        R[i:, j:, k:] += P[i, j, k] * Q[: n - i, : n - j, : n - k]
    return R


def diff(P: np.ndarray, axis: int) -> np.ndarray:
    n = P.shape[axis]
    w = np.arange(n).reshape([-1 if t == axis else 1 for t in range(3)])
    R = np.roll(P * w, -1, axis=axis)
    sl = [slice(None)] * 3
    sl[axis] = n - 1
    R[tuple(sl)] = 0.0
    return R


def mono(i: int, j: int, k: int, size: int = DEG) -> np.ndarray:
    P = np.zeros((size, size, size))
    P[i, j, k] = 1.0
    return P


# (x, y) monomials of total degree <= 4: the columns of the dialytic matrix
DIALYTIC_COLUMNS = tuple((i, d - i) for d in range(5) for i in range(d, -1, -1))
# multipliers for each equation; E2 * y^2 is left out because that row is a
# combination of the others and would make the pencil singular
_ROW_MULTIPLIERS = (
    (0, ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))),
    (1, ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1))),
    (2, ((0, 0), (1, 0), (0, 1))),
    (3, ((0, 0),)),
)


def critical_equations(a) -> tuple:
    """Dense forms of g, x g_y - y g_x, z g_x - x g_z, z g_y - y g_z.

    The centre is the origin (shift coefficients first).
    """
    g = to_dense(a)
    gx, gy, gz = diff(g, 0), diff(g, 1), diff(g, 2)
    X, Y, Z = mono(1, 0, 0), mono(0, 1, 0), mono(0, 0, 1)
    return g, mul(X, gy) - mul(Y, gx), mul(Z, gx) - mul(X, gz), mul(Z, gy) - mul(Y, gz)


def _dialytic_matrix(a) -> np.ndarray:
    eqs = critical_equations(a)
    rows = []
    for e, mults in _ROW_MULTIPLIERS:
        for i, j in mults:
            rows.append(mul(mono(i, j, 0), eqs[e]))
    M = np.zeros((4, len(rows), len(DIALYTIC_COLUMNS)))
    for r, P in enumerate(rows):
        for col, (i, j) in enumerate(DIALYTIC_COLUMNS):
            M[:, r, col] = P[i, j, :4]
    return M


@lru_cache(maxsize=1)
def dialytic_tensor() -> np.ndarray:
    """T with ``M(z) = sum_k z^k einsum('n,nkrc->rc', a, T)``, shape (16, 4, 15, 15).

    The matrix polynomial is linear in the (shifted) coefficients, so it is
    assembled once from unit coefficient vectors.
    """
    T = np.stack([_dialytic_matrix(np.eye(16)[n]) for n in range(16)])
    T.setflags(write=False)
    return T


def dialytic_matrix(a_shifted) -> np.ndarray:
    """Matrix-polynomial coefficients (..., 4, 15, 15) for shifted coefficients (..., 16)."""
    return np.einsum("...n,nkrc->...krc", np.asarray(a_shifted, dtype=float), dialytic_tensor())


def polyeig(M: np.ndarray, balance: bool = True) -> np.ndarray:
    """Eigenvalues of ``sum_k z^k M[k]`` through a companion pencil and QZ.

    Infinite eigenvalues come back as ``inf`` or ``nan``.
    """
    d = M.shape[0] - 1
    n = M.shape[1]
    M = np.array(M, dtype=float)
    if balance:
        rs = np.abs(M).max(axis=(0, 2))
        rs[rs == 0] = 1.0
        M /= rs[None, :, None]
        cs = np.abs(M).max(axis=(0, 1))
        cs[cs == 0] = 1.0
        M /= cs[None, None, :]
    N = d * n
    A = np.zeros((N, N))
    B = np.eye(N)
    A[: N - n, n:] = np.eye(N - n)
    for j in range(d):
        A[N - n:, j * n:(j + 1) * n] = -M[j]
    B[N - n:, N - n:] = M[d]
    alpha, beta = sla.eigvals(A, B, homogeneous_eigvals=True, overwrite_a=True,
                              check_finite=False)
    with np.errstate(divide="ignore", invalid="ignore"):
        return alpha / beta


def batched_roots(coeffs: np.ndarray) -> np.ndarray:
    """Roots of many polynomials via companion eigenvalues.

    ``coeffs`` is (m, d + 1) with the highest degree first.  Rows whose leading
    coefficient vanishes yield non-finite roots, which callers filter out.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    m, n1 = coeffs.shape
    d = n1 - 1
    C = np.zeros((m, d, d))
    with np.errstate(divide="ignore", invalid="ignore"):
        C[:, 0, :] = -coeffs[:, 1:] / coeffs[:, :1]
    if d > 1:
        C[:, np.arange(1, d), np.arange(d - 1)] = 1.0
    bad = ~np.all(np.isfinite(C), axis=(1, 2))
    C[bad] = 0.0
    r = np.linalg.eigvals(C).astype(complex)
    r[bad] = np.nan
    return r


def stable_quadratic_roots(qa, qb, qc, slack: float = 1e-12):
    """Real roots of ``qa r^2 + qb r + qc`` (arrays); NaN where absent.

    A slightly negative discriminant (relative ``slack``) is treated as zero.
    When ``qa`` vanishes the single linear root is returned in the first slot.
    """
    qa, qb, qc = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (qa, qb, qc)))
    disc = qb * qb - 4.0 * qa * qc
    scale = qb * qb + np.abs(4.0 * qa * qc)
    ok = disc >= -slack * scale
    s = np.sqrt(np.maximum(disc, 0.0))
    q = -0.5 * (qb + np.copysign(s, qb))
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = np.where(qa != 0, q / qa, -qc / qb)
        r2 = np.where((qa != 0) & (q != 0), qc / q, np.where(qa != 0, r1, np.nan))
    r1 = np.where(ok, r1, np.nan)
    r2 = np.where(ok, r2, np.nan)
    r1[~np.isfinite(r1)] = np.nan
    r2[~np.isfinite(r2)] = np.nan
    return r1, r2


def is_nonlinear_zero(a, rel: float) -> bool:
    a = np.asarray(a, dtype=float)
    scale = np.abs(a).max()
    return bool(scale > 0 and np.abs(a[_NONLINEAR]).max() <= rel * scale)
