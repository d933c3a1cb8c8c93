"""Entry laws, the truncation/centering/rescaling pipeline, and matrix sampling.

An entry law is a zero-mean distribution for the matrix entries together with
its recorded moments.  Sampling a matrix draws the diagonal first, then the
above-diagonal entries row by row, and multiplies everything by n^{-1/2}; the
same (spec, seed) pair therefore always reproduces the same matrix bit for
bit, and independent replicas can be sampled concurrently from distinct seeds.

Truncation replaces an entry x by x*1{|x| <= n^{1/4}}, recenters by the mean m
of that censored variable and rescales by its standard deviation s, restoring
mean 0 and the original variance.  m, s and the post-truncation moments are
computed by quadrature (continuous kinds) or exact sums (discrete kinds) so
that entries stay exactly i.i.d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy import integrate, stats

__all__ = [
    "KINDS",
    "EntryDistribution",
    "WignerSpec",
    "SymmetricMatrix",
    "make_distribution",
    "truncate_center_rescale",
    "sample_wigner",
]

KINDS = ("gaussian", "rademacher", "uniform", "student_t", "two_point")

_UNIFORM_HW = math.sqrt(3.0)  # U(-sqrt3, sqrt3) has unit variance


def _atoms(kind: str, param: Optional[float]):
    """Support points and probabilities for the discrete kinds, else None."""
    if kind == "rademacher":
        return ((1.0, 0.5), (-1.0, 0.5))
    if kind == "two_point":
        p = param
        return (
            (math.sqrt((1.0 - p) / p), p),
            (-math.sqrt(p / (1.0 - p)), 1.0 - p),
        )
    return None


def _frozen(kind: str, param: Optional[float]):
    """scipy frozen distribution for the continuous standardized kinds."""
    if kind == "gaussian":
        return stats.norm()
    if kind == "uniform":
        return stats.uniform(loc=-_UNIFORM_HW, scale=2.0 * _UNIFORM_HW)
    if kind == "student_t":
        return stats.t(param, scale=math.sqrt((param - 2.0) / param))
    raise ValueError(f"unknown continuous kind {kind!r}")


def _censored_moment(kind: str, param: Optional[float], k: int, cut: float,
                     center: float = 0.0) -> float:
    """E[(censor(x, cut) - center)^k] for the standardized base law."""
    atoms = _atoms(kind, param)
    if atoms is not None:
        total = 0.0
        for x, prob in atoms:
            y = x if abs(x) <= cut else 0.0
            total += prob * (y - center) ** k
        return total
    frozen = _frozen(kind, param)
    lo, hi = frozen.support()
    a = max(-cut, lo)
    b = min(cut, hi)
    val, _ = integrate.quad(
        lambda x: (x - center) ** k * frozen.pdf(x),
        a, b, limit=200, epsabs=1e-13, epsrel=1e-12,
    )
    p_out = float(frozen.sf(cut) + frozen.cdf(-cut))
    if p_out > 0.0:
        val += p_out * (0.0 - center) ** k
    return val


def _support_radius(kind: str, param: Optional[float]) -> float:
    """Largest |x| the standardized base law can produce (inf if unbounded)."""
    atoms = _atoms(kind, param)
    if atoms is not None:
        return max(abs(x) for x, _ in atoms)
    if kind == "uniform":
        return _UNIFORM_HW
    return math.inf


@dataclass(frozen=True)
class EntryDistribution:
    """A zero-mean entry law with recorded moments.

    Sampling draws the standardized base law of `kind`, censors it to zero
    outside [-cut, cut], and applies y -> scale * (y - shift).  For a law
    fresh out of make_distribution, shift = 0, scale = 1 and cut = inf.
    nu2..nu6 are the moments of the final variable; +inf marks a divergent
    moment.  truncation_level records the censoring threshold n^{1/4} on the
    final variable's scale (None when untruncated).
    """

    kind: str
    param: Optional[float] = None
    shift: float = 0.0
    scale: float = 1.0
    cut: float = math.inf
    nu2: float = 1.0
    nu3: float = 0.0
    nu4: float = math.inf
    nu6: float = math.inf
    truncation_level: Optional[float] = None

    @property
    def sd(self) -> float:
        return math.sqrt(self.nu2)

    @property
    def is_truncated(self) -> bool:
        return self.truncation_level is not None

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        """Draw entries; the draw order per kind is fixed and documented."""
        kind = self.kind
        if kind == "gaussian":
            raw = rng.standard_normal(size)
        elif kind == "rademacher":
            raw = rng.integers(0, 2, size).astype(np.float64) * 2.0 - 1.0
        elif kind == "uniform":
            raw = rng.uniform(-_UNIFORM_HW, _UNIFORM_HW, size)
        elif kind == "student_t":
            df = self.param
            raw = rng.standard_t(df, size) * math.sqrt((df - 2.0) / df)
        elif kind == "two_point":
            p = self.param
            a = math.sqrt((1.0 - p) / p)
            b = -math.sqrt(p / (1.0 - p))
            raw = np.where(rng.random(size) < p, a, b)
        else:
            raise ValueError(f"unknown kind {self.kind!r}")
        if math.isfinite(self.cut):
            raw = np.where(np.abs(raw) <= self.cut, raw, 0.0)
        return self.scale * (raw - self.shift)

    def scaled_to(self, sd: float) -> "EntryDistribution":
        """Same shape of law, rescaled to standard deviation sd."""
        if self.is_truncated:
            raise ValueError("rescale before truncation, not after")
        sd = float(sd)
        if not sd > 0.0:
            raise ValueError(f"sd must be positive, got {sd}")
        factor = sd / math.sqrt(self.nu2)
        return replace(
            self,
            scale=self.scale * factor,
            nu2=self.nu2 * factor ** 2,
            nu3=self.nu3 * factor ** 3,
            nu4=self.nu4 * factor ** 4,
            nu6=self.nu6 * factor ** 6,
        )


def make_distribution(kind: str, df: Optional[float] = None,
                      p: Optional[float] = None) -> EntryDistribution:
    """Build a standardized (mean 0, variance 1) entry law.

    Divergent higher moments are recorded as +inf: student_t needs df > 4 for
    a finite fourth moment and df > 6 for a finite sixth.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {KINDS}")
    param: Optional[float] = None
    if kind == "gaussian":
        nu3, nu4, nu6 = 0.0, 3.0, 15.0
    elif kind == "rademacher":
        nu3, nu4, nu6 = 0.0, 1.0, 1.0
    elif kind == "uniform":
        nu3, nu4, nu6 = 0.0, 9.0 / 5.0, 27.0 / 7.0
    elif kind == "student_t":
        if df is None or not df > 2.0:
            raise ValueError(f"student_t requires df > 2 for a finite variance, got {df}")
        param = float(df)
        nu3 = 0.0 if df > 3.0 else math.inf
        nu4 = 3.0 * (df - 2.0) / (df - 4.0) if df > 4.0 else math.inf
        nu6 = (
            15.0 * (df - 2.0) ** 2 / ((df - 4.0) * (df - 6.0))
            if df > 6.0
            else math.inf
        )
    elif kind == "two_point":
        if p is None or not 0.0 < p < 1.0:
            raise ValueError(f"two_point requires 0 < p < 1, got {p}")
        param = float(p)
        q = 1.0 - p
        nu3 = (1.0 - 2.0 * p) / math.sqrt(p * q)
        nu4 = (1.0 - 3.0 * p * q) / (p * q)
        nu6 = (q ** 5 + p ** 5) / (p * q) ** 2
    return EntryDistribution(kind=kind, param=param, nu2=1.0,
                             nu3=nu3, nu4=nu4, nu6=nu6)


def truncate_center_rescale(dist: EntryDistribution, n: int) -> EntryDistribution:
    """Censor at n^{1/4}, recenter, and rescale back to the original variance.

    The threshold applies to the entry on its own scale; a law of standard
    deviation sd is censored where |entry| > n^{1/4}, i.e. the standardized
    base variable is censored at n^{1/4}/sd.  Returns a bounded law with all
    moments finite.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if dist.is_truncated:
        raise ValueError("distribution is already truncated")
    level = float(n) ** 0.25
    cut = level / dist.scale
    if _support_radius(dist.kind, dist.param) <= cut:
        # censoring never fires; the transform is the identity
        return replace(dist, truncation_level=level)
    m = _censored_moment(dist.kind, dist.param, 1, cut)
    second = _censored_moment(dist.kind, dist.param, 2, cut, center=m)
    if second <= 1e-12:
        raise ValueError(
            f"degenerate law: variance {second:.3e} after censoring at {cut:.4g}"
        )
    s = math.sqrt(second)
    new_scale = dist.scale / s
    moments = {}
    for k in (3, 4, 6):
        mk = _censored_moment(dist.kind, dist.param, k, cut, center=m)
        moments[k] = mk * new_scale ** k
    return replace(
        dist,
        shift=m,
        scale=new_scale,
        cut=cut,
        nu2=dist.nu2,
        nu3=moments[3],
        nu4=moments[4],
        nu6=moments[6],
        truncation_level=level,
    )


@dataclass(frozen=True)
class WignerSpec:
    """Recipe for one n x n symmetric random matrix.

    Off-diagonal entries have variance 1, diagonal entries variance sigma^2.
    """

    n: int
    offdiag: EntryDistribution
    diag: EntryDistribution
    sigma: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if abs(self.offdiag.nu2 - 1.0) > 1e-8:
            raise ValueError(
                f"off-diagonal law must have unit variance, got {self.offdiag.nu2}"
            )
        if abs(self.diag.nu2 - self.sigma ** 2) > 1e-8 * max(1.0, self.sigma ** 2):
            raise ValueError(
                f"diagonal law variance {self.diag.nu2} != sigma^2 = {self.sigma ** 2}"
            )


@dataclass(frozen=True)
class SymmetricMatrix:
    """Packed upper triangle (row major, diagonal included) of W = n^{-1/2} X."""

    n: int
    upper: np.ndarray
    seed: int

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        iu = np.triu_indices(self.n)
        a[iu] = self.upper
        a.T[iu] = self.upper
        return a


def sample_wigner(spec: WignerSpec) -> SymmetricMatrix:
    """Draw one matrix; identical (spec, seed) gives a bit-identical result."""
    n = spec.n
    rng = np.random.default_rng(spec.seed)
    diag_vals = spec.diag.sample(rng, n)
    off_vals = spec.offdiag.sample(rng, n * (n - 1) // 2)
    a = np.zeros((n, n))
    iu1 = np.triu_indices(n, 1)
    a[iu1] = off_vals
    a[np.diag_indices(n)] = diag_vals
    a *= 1.0 / math.sqrt(n)
    return SymmetricMatrix(n=n, upper=a[np.triu_indices(n)], seed=spec.seed)
