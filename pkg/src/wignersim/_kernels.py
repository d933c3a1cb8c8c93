"""Hot numeric kernels for the symmetric eigensolver.

Two implementations of each kernel live here: a scalar-loop version compiled
with numba (the default) and a vectorized/plain-Python fallback that needs
nothing beyond numpy.  Set the environment variable ``WIGNERSIM_DISABLE_NUMBA``
to ``1`` (or ``true``) before import to force the fallback; the module-level
flag ``ACCELERATED`` records which path is active.  ``benchmarks/`` contains a
script timing one path against the other.

Algorithm: Householder similarity reduction to tridiagonal form followed by
the implicit-shift QL iteration with Wilkinson shifts.  An off-diagonal entry
e_k is declared negligible once |e_k| <= macheps * (|d_k| + |d_{k+1}|), and
each eigenvalue gets at most 50 QL sweeps.
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = [
    "ACCELERATED",
    "QL_MAX_SWEEPS",
    "householder_tridiag",
    "householder_tridiag_numpy",
    "ql_implicit",
    "ql_implicit_numpy",
    "tridiag_active",
    "ql_active",
]

_MACHEPS = float(np.finfo(np.float64).eps)
QL_MAX_SWEEPS = 50


def _householder_tridiag_impl(a, d, e, u, w):
    # Reduce the symmetric matrix `a` (destroyed) to tridiagonal form.
    # Diagonal goes to d (length n), subdiagonal to e (length n-1); u and w
    # are length-n scratch vectors kept contiguous so the inner loops stream.
    # Column sums are rescaled before squaring to dodge overflow/underflow.
    n = a.shape[0]
    for k in range(n - 2):
        scale = 0.0
        for i in range(k + 1, n):
            scale += abs(a[i, k])
        if scale == 0.0:
            e[k] = 0.0
            continue
        sigma = 0.0
        for i in range(k + 1, n):
            u[i] = a[i, k] / scale
            sigma += u[i] * u[i]
        x0 = u[k + 1]
        alpha = -math.sqrt(sigma) if x0 >= 0.0 else math.sqrt(sigma)
        e[k] = scale * alpha
        h = sigma - x0 * alpha
        u[k + 1] = x0 - alpha
        # p = A22 @ u / h, exploiting symmetry of the trailing block
        kdot = 0.0
        for i in range(k + 1, n):
            s = 0.0
            for j in range(k + 1, n):
                s += a[i, j] * u[j]
            s /= h
            w[i] = s
            kdot += s * u[i]
        kdot /= 2.0 * h
        # w <- p - K u; rank-2 update A22 -= u w^T + w u^T
        for i in range(k + 1, n):
            w[i] -= kdot * u[i]
        for i in range(k + 1, n):
            ui = u[i]
            wi = w[i]
            for j in range(k + 1, n):
                a[i, j] -= ui * w[j] + wi * u[j]
    if n > 1:
        e[n - 2] = a[n - 1, n - 2]
    for i in range(n):
        d[i] = a[i, i]


def _ql_implicit_impl(d, e):
    # Implicit-shift QL on the tridiagonal (d, e); d is overwritten with the
    # (unsorted) eigenvalues.  e has length n; e[n-1] is workspace and must be
    # zero on entry.  Returns -1 on success, else the index that failed to
    # converge within QL_MAX_SWEEPS sweeps.
    n = d.shape[0]
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _MACHEPS * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > QL_MAX_SWEEPS:
                return l
            # Wilkinson shift from the leading 2x2 of the active block
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    # rotation annihilated; drop the shift and restart
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return -1


def householder_tridiag_numpy(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized-numpy Householder reduction. Returns (diagonal, subdiagonal)."""
    a = np.array(matrix, dtype=np.float64, copy=True, order="C")
    n = a.shape[0]
    e = np.zeros(max(n - 1, 0))
    for k in range(n - 2):
        x = a[k + 1 :, k]
        scale = np.abs(x).sum()
        if scale == 0.0:
            e[k] = 0.0
            continue
        x = x / scale
        sigma = float(x @ x)
        alpha = -math.sqrt(sigma) if x[0] >= 0.0 else math.sqrt(sigma)
        e[k] = scale * alpha
        h = sigma - x[0] * alpha
        u = x.copy()
        u[0] -= alpha
        block = a[k + 1 :, k + 1 :]
        p = block @ u / h
        kdot = float(u @ p) / (2.0 * h)
        w = p - kdot * u
        block -= np.outer(u, w) + np.outer(w, u)
    if n > 1:
        e[n - 2] = a[n - 1, n - 2]
    d = np.diagonal(a).copy()
    return d, e


def ql_implicit_numpy(d: np.ndarray, e: np.ndarray) -> int:
    """Uncompiled QL iteration (same algorithm as the jitted kernel)."""
    return _ql_implicit_impl(d, e)


_disable = os.environ.get("WIGNERSIM_DISABLE_NUMBA", "").strip().lower()
ACCELERATED = _disable not in ("1", "true", "yes")

if ACCELERATED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        ACCELERATED = False

if ACCELERATED:
    _householder_jit = njit(cache=True, nogil=True, fastmath=True)(
        _householder_tridiag_impl
    )
    _ql_jit = njit(cache=True, nogil=True)(_ql_implicit_impl)

    def householder_tridiag(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        a = np.array(matrix, dtype=np.float64, copy=True, order="C")
        n = a.shape[0]
        d = np.empty(n)
        e = np.zeros(max(n - 1, 0))
        _householder_jit(a, d, e, np.empty(n), np.empty(n))
        return d, e

    def ql_implicit(d: np.ndarray, e: np.ndarray) -> int:
        return int(_ql_jit(d, e))

else:
    householder_tridiag = householder_tridiag_numpy
    ql_implicit = ql_implicit_numpy


def tridiag_active(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Householder reduction via the active (numba or numpy) path."""
    return householder_tridiag(matrix)


def ql_active(d: np.ndarray, e: np.ndarray) -> int:
    """QL iteration via the active path; returns -1 or the failing index."""
    return ql_implicit(d, e)
