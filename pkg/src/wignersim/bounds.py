"""Executable distance and moment inequalities.

Four checkers live here:

* bai_rhs: the deterministic Berry-Esseen-type bound relating the sup distance
  between a step CDF F and a smooth law G to an integral of their Stieltjes
  transforms plus tail and smoothing terms.  It holds for every (F, G) with
  valid constants, so a violation is a numerics bug, not randomness.
* variance_bound_check: Var(s_n(z)) * n * |z + 2 s(z)|^2 over a z-grid should
  stay bounded; reported as a ratio table with a max <= 10 * median policy.
* moment_bound_check: E|s_n - mean|^{2l} * n^{2l} * v^{3l}, same policy.
* beta_exceedance_check: frequency of |beta_i| > 2 scaled by n^2 v^2; exactly
  zero once v >= 1/2 because |beta_i| <= 1/v.

The stability thresholds (10x median within a grid, bounded drift across n)
are an operational policy for "bounded by a constant", not sharp constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from .law import SemicircleLaw
from .spectra import StepCdf, kolmogorov_distance

__all__ = [
    "BaiConstants",
    "BoundReport",
    "validate_constants",
    "bai_rhs",
    "variance_bound_check",
    "moment_bound_check",
    "beta_exceedance_check",
    "stability_across",
]

DEFAULT_C0 = 2.0  # v floor is C0 * n^{-1/2}; "sufficiently large" made concrete


@dataclass(frozen=True)
class BaiConstants:
    """Constants (A, B, eps, v) with the derived rho and zeta."""

    A: float
    B: float
    eps: float
    v: float
    rho: float
    zeta: float


def validate_constants(A: float, B: float, eps: float, v: float) -> BaiConstants:
    """Check the constraint chain and derive rho, zeta; reject with the name
    of the first violated constraint."""
    if not (A > B > 0.0):
        raise ValueError(f"need A > B > 0, got A={A}, B={B}")
    if not v > 0.0:
        raise ValueError(f"need v > 0, got v={v}")
    if not eps > 0.0:
        raise ValueError(f"need eps > 0, got eps={eps}")
    rho = 2.0 / math.pi * math.atan(eps)
    if not rho > 0.5:
        raise ValueError(f"need rho > 1/2, got rho={rho} (eps={eps} too small)")
    zeta = 4.0 * B / (math.pi * (A - B) * (2.0 * rho - 1.0))
    if not 0.0 < zeta < 1.0:
        raise ValueError(f"need zeta in (0,1), got zeta={zeta}")
    return BaiConstants(A=float(A), B=float(B), eps=float(eps), v=float(v),
                        rho=rho, zeta=zeta)


@dataclass
class BoundReport:
    """Evaluated sides of one inequality with a pass flag and grid metadata."""

    name: str
    constants: dict
    passed: bool
    lhs: object = None
    rhs: object = None
    ratio: Optional[list] = None
    grid: Optional[list] = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def clean(x):
            if isinstance(x, np.ndarray):
                return x.tolist()
            if isinstance(x, (np.floating, np.integer)):
                return x.item()
            if isinstance(x, complex):
                return [x.real, x.imag]
            if isinstance(x, dict):
                return {k: clean(v) for k, v in x.items()}
            if isinstance(x, (list, tuple)):
                return [clean(v) for v in x]
            return x

        return {
            "name": self.name,
            "constants": clean(self.constants),
            "passed": bool(self.passed),
            "lhs": clean(self.lhs),
            "rhs": clean(self.rhs),
            "ratio": clean(self.ratio),
            "grid": clean(self.grid),
            "details": clean(self.details),
        }


def _interval_l1(cdf: StepCdf, law: SemicircleLaw, lo: float, hi: float) -> float:
    """Exact integral of |F - G| over [lo, hi] for step F and semicircle G.

    F is constant between jumps and G is monotone there, so each piece either
    keeps one sign or crosses once at the quantile of the step level; both
    cases reduce to the closed-form antiderivative of G.
    """
    if hi <= lo:
        return 0.0
    cuts = [lo] + [float(p) for p in cdf.points if lo < p < hi] + [hi]
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b <= a:
            continue
        c = float(cdf.eval(a))  # right-continuity: value on [a, b)
        ga, gb = law.cdf(a), law.cdf(b)
        anti = lambda x: law.cdf_antiderivative(x)
        if c <= ga:  # G >= c on the whole piece
            total += (anti(b) - anti(a)) - c * (b - a)
        elif c >= gb:  # G <= c on the whole piece
            total += c * (b - a) - (anti(b) - anti(a))
        else:  # one crossing at the quantile of c
            xs = law.quantile(c)
            xs = min(max(xs, a), b)
            total += c * (xs - a) - (anti(xs) - anti(a))
            total += (anti(b) - anti(xs)) - c * (b - xs)
    return total


def _tail_l1(cdf: StepCdf, law: SemicircleLaw, B: float) -> float:
    """Exact integral of |F - G| over |x| > B."""
    lo_sup, hi_sup = law.support
    masses = cdf.masses
    pts = cdf.points
    total = 0.0
    # beyond the law's support, |F - G| is F on the left and 1 - F on the right
    right_edge = max(B, hi_sup)
    total += float(np.sum(masses * np.clip(pts - right_edge, 0.0, None)))
    left_edge = min(-B, lo_sup)
    total += float(np.sum(masses * np.clip(left_edge - pts, 0.0, None)))
    # pieces of the support outside [-B, B], if any
    if B < hi_sup:
        total += _interval_l1(cdf, law, B, hi_sup)
    if -B > lo_sup:
        total += _interval_l1(cdf, law, lo_sup, -B)
    return total


def _smoothing_sup(law: SemicircleLaw, delta: float, step: float) -> float:
    """Upper bound for sup_x of the integral of |G(x+u) - G(x)| over |u| <= delta.

    The integral equals Ganti(x+delta) + Ganti(x-delta) - 2 Ganti(x); a grid
    sup plus a Lipschitz slack (the x-derivative is at most 2 f_max delta)
    covers the continuum sup.
    """
    lo, hi = law.support
    xs = np.arange(lo - delta, hi + delta + step, step)
    vals = (
        law.cdf_antiderivative(xs + delta)
        + law.cdf_antiderivative(xs - delta)
        - 2.0 * law.cdf_antiderivative(xs)
    )
    f_max = 1.0 / (math.pi * law.sigma)
    return float(np.max(vals)) + f_max * delta * step


def bai_rhs(cdf: StepCdf, law: SemicircleLaw, constants: BaiConstants) -> BoundReport:
    """Evaluate both sides of the distance bound; the pass flag is lhs <= rhs.

    Term breakdown (before the common prefactor):
      transform: integral over [-A, A] of |s_F - s_G| at height v (adaptive
                 quadrature, exact finite sum for s_F, closed form for s_G);
      tail:      2 pi / v times the exact integral of |F - G| over |x| > B;
      smoothing: 1/v times the sup over x of the local increment integral of
                 G over a window of half-width 2 v eps.
    """
    c = constants
    v = c.v

    def integrand(u: float) -> float:
        z = complex(u, v)
        return abs(cdf.stieltjes(z) - law.stieltjes(z))

    quad_points = sorted(
        p for p in (law.support[0], 0.0, law.support[1]) if -c.A < p < c.A
    )
    term_transform, quad_err = integrate.quad(
        integrand, -c.A, c.A, points=quad_points or None,
        limit=800, epsabs=1e-11, epsrel=1e-9,
    )
    if quad_err > 1e-5 * max(1.0, term_transform):
        raise RuntimeError(
            f"transform-term quadrature did not converge: estimate {quad_err}"
        )
    term_tail = 2.0 * math.pi / v * _tail_l1(cdf, law, c.B)
    delta = 2.0 * v * c.eps
    term_smooth = _smoothing_sup(law, delta, step=v / 10.0) / v
    prefactor = 1.0 / (math.pi * (1.0 - c.zeta) * (2.0 * c.rho - 1.0))
    rhs = prefactor * (term_transform + term_tail + term_smooth)
    lhs = kolmogorov_distance(cdf, law)
    return BoundReport(
        name="bai_inequality",
        constants={"A": c.A, "B": c.B, "eps": c.eps, "v": v,
                   "rho": c.rho, "zeta": c.zeta},
        passed=bool(lhs <= rhs),
        lhs=lhs,
        rhs=rhs,
        details={
            "prefactor": prefactor,
            "term_transform": term_transform,
            "term_tail": term_tail,
            "term_smoothing": term_smooth,
        },
    )


def _zero_floor(sn: np.ndarray) -> float:
    return 64.0 * np.finfo(np.float64).eps * float(np.abs(sn).max(initial=1.0))


def _check_grid(z_grid: Sequence, n: int, c0: float) -> list[tuple[float, float]]:
    grid = [(float(u), float(v)) for u, v in z_grid]
    floor = c0 / math.sqrt(n)
    bad = [(u, v) for u, v in grid if v < floor]
    if bad:
        raise ValueError(
            f"v must be >= {c0} * n^(-1/2) = {floor:.4g} at every grid point; "
            f"violated at {bad}"
        )
    return grid


def variance_bound_check(sn_samples: np.ndarray, n: int,
                         z_grid: Sequence, sigma: float = 1.0,
                         c0: float = DEFAULT_C0,
                         spread_factor: float = 10.0) -> BoundReport:
    """Replica variance of s_n(z) scaled by n |z + 2 s(z)|^2 over a z-grid.

    sn_samples has shape (replicas, len(z_grid)).  Needs at least 50 replicas
    for a usable variance estimate.  Pass policy: max ratio <= spread_factor
    times the median ratio.
    """
    sn = np.asarray(sn_samples, dtype=np.complex128)
    if sn.ndim != 2 or sn.shape[1] != len(z_grid):
        raise ValueError("sn_samples must be (replicas, grid points)")
    reps = sn.shape[0]
    if reps < 50:
        raise ValueError(f"need at least 50 replicas, got {reps}")
    grid = _check_grid(z_grid, n, c0)
    law = SemicircleLaw(sigma)
    zs = np.array([complex(u, v) for u, v in grid])
    center = sn.mean(axis=0)
    dev = np.abs(sn - center)
    # deviations at rounding level are not variance (identical replicas)
    dev[:, dev.max(axis=0) <= _zero_floor(sn)] = 0.0
    var = np.sum(dev ** 2, axis=0) / (reps - 1)
    weight = n * np.abs(zs + 2.0 * law.stieltjes(zs)) ** 2
    ratio = var * weight
    max_ratio = float(ratio.max())
    med_ratio = float(np.median(ratio))
    passed = max_ratio <= spread_factor * med_ratio
    return BoundReport(
        name="variance_bound",
        constants={"n": n, "replicas": reps, "c0": c0, "sigma": sigma,
                   "spread_factor": spread_factor},
        passed=bool(passed),
        lhs=var.tolist(),
        rhs=None,
        ratio=ratio.tolist(),
        grid=grid,
        details={"max_ratio": max_ratio, "median_ratio": med_ratio},
    )


def moment_bound_check(sn_samples: np.ndarray, n: int, l: int,
                       z_grid: Sequence, c0: float = DEFAULT_C0,
                       spread_factor: float = 10.0) -> BoundReport:
    """Centered moment E|s_n - mean|^{2l} scaled by n^{2l} v^{3l} over a grid."""
    if l not in (1, 2):
        raise ValueError(f"l must be 1 or 2, got {l}")
    sn = np.asarray(sn_samples, dtype=np.complex128)
    if sn.ndim != 2 or sn.shape[1] != len(z_grid):
        raise ValueError("sn_samples must be (replicas, grid points)")
    reps = sn.shape[0]
    if reps < 50:
        raise ValueError(f"need at least 50 replicas, got {reps}")
    grid = _check_grid(z_grid, n, c0)
    vs = np.array([v for _, v in grid])
    dev = np.abs(sn - sn.mean(axis=0))
    dev[:, dev.max(axis=0) <= _zero_floor(sn)] = 0.0
    moment = (dev ** (2 * l)).mean(axis=0)
    ratio = moment * float(n) ** (2 * l) * vs ** (3 * l)
    max_ratio = float(ratio.max())
    med_ratio = float(np.median(ratio))
    passed = max_ratio <= spread_factor * med_ratio
    return BoundReport(
        name=f"moment_bound_l{l}",
        constants={"n": n, "l": l, "replicas": reps, "c0": c0,
                   "spread_factor": spread_factor},
        passed=bool(passed),
        lhs=moment.tolist(),
        rhs=None,
        ratio=ratio.tolist(),
        grid=grid,
        details={"max_ratio": max_ratio, "median_ratio": med_ratio},
    )


def beta_exceedance_check(betas, n: int, v: float,
                          c0: float = DEFAULT_C0) -> BoundReport:
    """Empirical frequency of |beta_i| > 2, scaled by n^2 v^2.

    `betas` is a complex array of diagonal resolvent entries pooled over
    replicas (LeaveOneOutDiag objects are also accepted).  When v >= 1/2 the
    bound |beta_i| <= 1/v forces the frequency to be exactly zero, and the
    pass flag asserts that; otherwise the scaled frequency is reported and
    cross-grid stability is judged by the caller.
    """
    if len(betas) == 0:
        raise ValueError("no beta samples given")
    arr = np.asarray(
        [b.beta if hasattr(b, "beta") else b for b in np.ravel(betas)],
        dtype=np.complex128,
    )
    count = int(np.count_nonzero(np.abs(arr) > 2.0))
    freq = count / arr.size
    scaled = freq * n * n * v * v
    in_regime = v >= c0 / math.sqrt(n)
    forced_zero = v >= 0.5
    passed = (count == 0) if forced_zero else True
    return BoundReport(
        name="beta_exceedance",
        constants={"n": n, "v": v, "c0": c0},
        passed=bool(passed),
        lhs=freq,
        rhs=None,
        ratio=[scaled],
        grid=[(math.nan, v)],
        details={
            "samples": int(arr.size),
            "exceedances": count,
            "scaled_frequency": scaled,
            "in_regime": bool(in_regime),
            "forced_zero": bool(forced_zero),
        },
    )


def stability_across(values: Sequence[float], factor: float) -> dict:
    """Drift of a scaled statistic across runs: max/min with zeros tolerated.

    All-zero inputs count as perfectly stable (drift 1); a mix of zero and
    positive values is unstable (drift inf).
    """
    vals = [float(x) for x in values]
    if any(x < 0 for x in vals):
        raise ValueError("scaled statistics must be nonnegative")
    hi = max(vals)
    lo = min(vals)
    if hi == 0.0:
        drift = 1.0
    elif lo == 0.0:
        drift = math.inf
    else:
        drift = hi / lo
    return {"values": vals, "drift": drift, "factor": float(factor),
            "passed": drift <= factor}
