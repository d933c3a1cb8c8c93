"""Independent oracles the tests check the library against.

Nothing here imports library internals beyond public data containers: the
eigenvalue oracles run Sturm-sequence bisection on tridiagonal data or LDL^T
inertia bisection on dense symmetric matrices, and the distance oracle
evaluates the sup on a jump-aware candidate set.
"""

from __future__ import annotations

import numpy as np
from scipy import linalg as sla


def sturm_count_below(d: np.ndarray, e: np.ndarray, x: float) -> int:
    """Number of eigenvalues of the tridiagonal (d, e) strictly below x."""
    n = len(d)
    count = 0
    p = 1.0
    for i in range(n):
        off = e[i - 1] ** 2 if i > 0 else 0.0
        denom = p if p != 0.0 else 1e-300
        p = d[i] - x - off / denom
        if p < 0.0:
            count += 1
    return count


def _bisect_eigs(count_below, lo: float, hi: float, n: int,
                 tol: float) -> np.ndarray:
    eigs = np.empty(n)
    for k in range(n):
        a, b = lo, hi
        # smallest x with count_below(x) >= k+1 is the (k+1)-th eigenvalue
        while b - a > tol:
            mid = 0.5 * (a + b)
            if count_below(mid) >= k + 1:
                b = mid
            else:
                a = mid
        eigs[k] = 0.5 * (a + b)
    return eigs


def sturm_eigenvalues(d: np.ndarray, e: np.ndarray,
                      tol: float = 1e-13) -> np.ndarray:
    """All eigenvalues of a symmetric tridiagonal matrix by bisection."""
    d = np.asarray(d, dtype=np.float64)
    e = np.asarray(e, dtype=np.float64)
    n = len(d)
    radius = np.zeros(n)
    for i in range(n):
        r = 0.0
        if i > 0:
            r += abs(e[i - 1])
        if i < n - 1:
            r += abs(e[i])
        radius[i] = r
    lo = float(np.min(d - radius)) - 1.0
    hi = float(np.max(d + radius)) + 1.0
    scaled_tol = tol * max(1.0, abs(lo), abs(hi))

    def count(x):
        # count of eigenvalues < x; at x slightly above an eigenvalue the
        # Sturm sequence counts it, so bisection converges to the eigenvalue
        return sturm_count_below(d, e, x)

    return _bisect_eigs(count, lo, hi, n, scaled_tol)


def ldl_count_below(a: np.ndarray, x: float) -> int:
    """Eigenvalues of dense symmetric `a` below x, via LDL^T inertia."""
    n = a.shape[0]
    shifted = a - x * np.eye(n)
    _, d, _ = sla.ldl(shifted)
    count = 0
    i = 0
    while i < n:
        if i + 1 < n and d[i + 1, i] != 0.0:
            block = d[i : i + 2, i : i + 2]
            vals = np.linalg.eigvalsh(0.5 * (block + block.T))
            count += int(np.sum(vals < 0.0))
            i += 2
        else:
            if d[i, i] < 0.0:
                count += 1
            i += 1
    return count


def dense_bisect_eigenvalues(a: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """All eigenvalues of a dense symmetric matrix by inertia bisection."""
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]
    bound = float(np.max(np.sum(np.abs(a), axis=1))) + 1.0
    scaled_tol = tol * max(1.0, bound)
    return _bisect_eigs(lambda x: ldl_count_below(a, x), -bound, bound, n,
                        scaled_tol)


def chebyshev_tridiagonal_eigs(n: int) -> np.ndarray:
    """Spectrum of the (0 diagonal, 1 off-diagonal) tridiagonal matrix."""
    k = np.arange(1, n + 1)
    return np.sort(2.0 * np.cos(k * np.pi / (n + 1)))


def ks_sup_brute(points: np.ndarray, cum: np.ndarray, law,
                 extra_grid: int = 0) -> float:
    """Exact sup |F - G| for a step CDF against a monotone continuous law.

    Between jumps F is constant and G monotone, so the sup over each piece is
    attained at its endpoints; evaluating G at every jump from both sides of F
    is therefore exhaustive.  An optional uniform grid is unioned in as
    insurance against bookkeeping mistakes.
    """
    g = np.asarray(law.cdf(points), dtype=np.float64)
    below = np.concatenate(([0.0], cum[:-1]))
    sup = max(float(np.max(np.abs(cum - g))), float(np.max(np.abs(below - g))))
    if extra_grid:
        lo = min(points[0], law.support[0]) - 1.0
        hi = max(points[-1], law.support[1]) + 1.0
        xs = np.linspace(lo, hi, extra_grid)
        idx = np.searchsorted(points, xs, side="right")
        fvals = np.concatenate(([0.0], cum))[idx]
        sup = max(sup, float(np.max(np.abs(fvals - law.cdf(xs)))))
    return sup
