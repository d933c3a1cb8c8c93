"""Semicircle limit law: density, CDF, quantile, and Stieltjes transform.

The law with scale parameter sigma is supported on [-2*sigma, 2*sigma] and has
density sqrt(4*sigma^2 - x^2) / (2*pi*sigma^2).  Its Stieltjes transform
s(z) = integral of 1/(x - z) against the law satisfies, for sigma = 1,

    s(z)^2 + z*s(z) + 1 = 0,      Im s(z) > 0 for Im z > 0,

and the general-sigma transform is s_sigma(z) = s(z/sigma)/sigma.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

__all__ = [
    "SemicircleLaw",
    "UpperHalfPoint",
    "sc_pdf",
    "sc_cdf",
    "sc_cdf_antiderivative",
    "sc_quantile",
    "sc_stieltjes",
    "integral_bound_value",
    "write_curve_csv",
]


def _check_sigma(sigma: float) -> float:
    sigma = float(sigma)
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return sigma


def sc_pdf(x, sigma: float = 1.0):
    """Semicircle density at x; zero outside [-2*sigma, 2*sigma]."""
    sigma = _check_sigma(sigma)
    x = np.asarray(x, dtype=np.float64)
    inside = np.clip(4.0 * sigma * sigma - x * x, 0.0, None)
    out = np.sqrt(inside) / (2.0 * math.pi * sigma * sigma)
    return out if out.ndim else float(out)


def sc_cdf(x, sigma: float = 1.0):
    """Semicircle CDF, clamped to 0/1 outside the support."""
    sigma = _check_sigma(sigma)
    x = np.asarray(x, dtype=np.float64)
    xc = np.clip(x, -2.0 * sigma, 2.0 * sigma)
    root = np.sqrt(np.clip(4.0 * sigma * sigma - xc * xc, 0.0, None))
    out = (
        0.5
        + xc * root / (4.0 * math.pi * sigma * sigma)
        + np.arcsin(xc / (2.0 * sigma)) / math.pi
    )
    out = np.clip(out, 0.0, 1.0)
    return out if out.ndim else float(out)


def sc_cdf_antiderivative(x, sigma: float = 1.0):
    """Antiderivative of the CDF, normalized so it vanishes at -2*sigma.

    Used by the deterministic distance-bound terms, which integrate the CDF
    exactly over tail and smoothing windows.  Grows linearly with slope 1 to
    the right of the support and is 0 to the left.
    """
    sigma = _check_sigma(sigma)
    x = np.asarray(x, dtype=np.float64)
    xc = np.clip(x, -2.0 * sigma, 2.0 * sigma)
    s2 = sigma * sigma
    inside = np.clip(4.0 * s2 - xc * xc, 0.0, None)
    g = (
        xc / 2.0
        - inside ** 1.5 / (12.0 * math.pi * s2)
        + (xc * np.arcsin(xc / (2.0 * sigma)) + np.sqrt(inside)) / math.pi
    )
    out = g + np.clip(x - 2.0 * sigma, 0.0, None)
    return out if out.ndim else float(out)


def sc_quantile(p: float, sigma: float = 1.0) -> float:
    """Inverse CDF by bisection; exact at p in {0, 1/2, 1}."""
    sigma = _check_sigma(sigma)
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p == 0.0:
        return -2.0 * sigma
    if p == 1.0:
        return 2.0 * sigma
    if p == 0.5:
        return 0.0
    lo, hi = -2.0 * sigma, 2.0 * sigma
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if sc_cdf(mid, sigma) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * sigma:
            break
    return 0.5 * (lo + hi)


def sc_stieltjes(z, sigma: float = 1.0):
    """Stieltjes transform of the semicircle law on the upper half plane.

    The branch of sqrt(z^2 - 4) is chosen with positive imaginary part, which
    forces Im s(z) > 0; the root is then evaluated as -2/(z + w), avoiding
    cancellation far from the support.
    """
    sigma = _check_sigma(sigma)
    if isinstance(z, UpperHalfPoint):
        z = z.z
    z = np.asarray(z, dtype=np.complex128)
    if np.any(z.imag <= 0.0):
        raise ValueError("z must lie in the open upper half plane")
    zs = z / sigma
    w = np.sqrt(zs * zs - 4.0)
    w = np.where(w.imag < 0.0, -w, w)
    out = -2.0 / (zs + w) / sigma
    return out if out.ndim else complex(out)


def integral_bound_value(lo: float = -16.0, hi: float = 16.0) -> float:
    """Integral of 1/sqrt(|u^2 - 4|) over [lo, hi].

    The integrand has inverse-square-root singularities at u = +-2; the
    quadrature is told about them so the adaptive subdivision converges.
    """
    singular = [p for p in (-2.0, 2.0) if lo < p < hi]
    val, err = integrate.quad(
        lambda u: 1.0 / math.sqrt(abs(u * u - 4.0)),
        lo,
        hi,
        points=singular or None,
        limit=400,
        epsabs=1e-11,
        epsrel=1e-11,
    )
    if err > 1e-7:
        raise RuntimeError(f"quadrature did not converge: error estimate {err}")
    return val


@dataclass(frozen=True)
class UpperHalfPoint:
    """A point z = u + iv with v > 0."""

    u: float
    v: float

    def __post_init__(self):
        if not self.v > 0.0:
            raise ValueError(f"v must be positive, got {self.v}")

    @property
    def z(self) -> complex:
        return complex(self.u, self.v)


@dataclass(frozen=True)
class SemicircleLaw:
    """Semicircle law with support [-2*sigma, 2*sigma]."""

    sigma: float = 1.0

    def __post_init__(self):
        _check_sigma(self.sigma)

    @property
    def support(self) -> tuple[float, float]:
        return (-2.0 * self.sigma, 2.0 * self.sigma)

    def pdf(self, x):
        return sc_pdf(x, self.sigma)

    def cdf(self, x):
        return sc_cdf(x, self.sigma)

    def cdf_antiderivative(self, x):
        return sc_cdf_antiderivative(x, self.sigma)

    def quantile(self, p: float) -> float:
        return sc_quantile(p, self.sigma)

    def stieltjes(self, z):
        return sc_stieltjes(z, self.sigma)


def write_curve_csv(law: SemicircleLaw, path, num: int = 513) -> None:
    """Dump (x, pdf, cdf) rows spanning the support, for external plotting."""
    xs = np.linspace(-2.0 * law.sigma, 2.0 * law.sigma, num)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "pdf", "cdf"])
        for x in xs:
            writer.writerow([repr(float(x)), repr(law.pdf(x)), repr(law.cdf(x))])
