"""Symmetric eigensolver, empirical spectral distributions, and sup distance.

The eigensolver is Householder tridiagonalization followed by implicit-shift
QL (see _kernels); it returns all n eigenvalues sorted ascending and is
backward stable, which the trace and Frobenius invariants of Spectrum verify.
The empirical spectral distribution of a spectrum is the step CDF with mass
1/n at each eigenvalue, ties merged, and its sup distance to a continuous law
is evaluated exactly at the jump points.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import _kernels
from .ensemble import SymmetricMatrix

__all__ = [
    "Spectrum",
    "StepCdf",
    "tridiagonalize",
    "eigenvalues",
    "esd",
    "esd_eval",
    "kolmogorov_distance",
    "mean_esd",
    "write_spectrum_csv",
]

MatrixLike = Union[SymmetricMatrix, np.ndarray]


def _as_dense(matrix: MatrixLike) -> np.ndarray:
    if isinstance(matrix, SymmetricMatrix):
        return matrix.to_dense()
    a = np.asarray(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(a).max())):
        raise ValueError("matrix is not symmetric")
    return a


@dataclass(frozen=True)
class Spectrum:
    """All eigenvalues of one sampled matrix, sorted ascending."""

    eigenvalues: np.ndarray
    seed: Optional[int] = None

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=np.float64)
        if ev.ndim != 1 or ev.size == 0:
            raise ValueError("eigenvalues must be a non-empty 1-D array")
        if np.any(np.diff(ev) < 0.0):
            raise ValueError("eigenvalues must be sorted ascending")
        object.__setattr__(self, "eigenvalues", ev)

    @property
    def n(self) -> int:
        return self.eigenvalues.size


def tridiagonalize(matrix: MatrixLike) -> tuple[np.ndarray, np.ndarray]:
    """Householder reduction to tridiagonal form (diagonal, subdiagonal).

    The output is orthogonally similar to the input; the diagonal sums to the
    input trace up to rounding.  Off-diagonal signs are a convention.
    """
    return _kernels.tridiag_active(_as_dense(matrix))


def eigenvalues(matrix: MatrixLike) -> Spectrum:
    """All eigenvalues, sorted ascending."""
    a = _as_dense(matrix)
    d, e = _kernels.tridiag_active(a)
    n = d.shape[0]
    work = np.zeros(n)
    if n > 1:
        work[: n - 1] = e
    status = _kernels.ql_active(d, work)
    if status >= 0:
        raise RuntimeError(
            f"eigenvalue {status} did not converge within "
            f"{_kernels.QL_MAX_SWEEPS} QL sweeps"
        )
    d.sort()
    seed = matrix.seed if isinstance(matrix, SymmetricMatrix) else None
    return Spectrum(eigenvalues=d, seed=seed)


@dataclass(frozen=True)
class StepCdf:
    """Right-continuous step CDF: jump points and cumulative masses."""

    points: np.ndarray
    cum: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        cum = np.asarray(self.cum, dtype=np.float64)
        if pts.ndim != 1 or pts.shape != cum.shape or pts.size == 0:
            raise ValueError("points and cum must be matching non-empty 1-D arrays")
        if np.any(np.diff(pts) <= 0.0):
            raise ValueError("jump points must be strictly increasing")
        if np.any(np.diff(cum) < 0.0) or cum[0] < 0.0:
            raise ValueError("cumulative masses must be non-decreasing from >= 0")
        if abs(cum[-1] - 1.0) > 1e-9:
            raise ValueError(f"total mass must be 1, got {cum[-1]}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "cum", cum)

    @property
    def masses(self) -> np.ndarray:
        return np.diff(self.cum, prepend=0.0)

    def eval(self, x):
        idx = np.searchsorted(self.points, np.asarray(x, dtype=np.float64),
                              side="right")
        padded = np.concatenate(([0.0], self.cum))
        out = padded[idx]
        return out if out.ndim else float(out)

    def stieltjes(self, z: complex) -> complex:
        """Transform integral of 1/(x - z) dF(x) as an exact finite sum."""
        z = complex(z)
        if z.imag <= 0.0:
            raise ValueError("z must lie in the open upper half plane")
        return complex(np.sum(self.masses / (self.points - z)))


def esd(spectrum: Spectrum) -> StepCdf:
    """Empirical spectral distribution: mass 1/n per eigenvalue, ties merged."""
    pts, counts = np.unique(spectrum.eigenvalues, return_counts=True)
    cum = np.cumsum(counts) / spectrum.n
    cum[-1] = 1.0
    return StepCdf(points=pts, cum=cum)


def esd_eval(cdf: StepCdf, x):
    """Evaluate the step CDF at x (right-continuous)."""
    return cdf.eval(x)


def kolmogorov_distance(cdf: StepCdf, law) -> float:
    """sup_x |F(x) - G(x)| for a step F against a continuous law G.

    The supremum is attained at the jump points: at each one, compare G with
    the CDF value from above and from below.
    """
    g = np.asarray(law.cdf(cdf.points), dtype=np.float64)
    below = np.concatenate(([0.0], cdf.cum[:-1]))
    return float(np.max(np.maximum(cdf.cum - g, g - below)))


def mean_esd(spectra: Sequence[Spectrum]) -> StepCdf:
    """Pooled step CDF over replicas: mass 1/(R*n) per eigenvalue.

    Averaging empirical distributions of equal-size spectra is the same as
    pooling all eigenvalues, which is how the expected ESD is estimated.
    """
    spectra = list(spectra)
    if not spectra:
        raise ValueError("need at least one spectrum")
    n = spectra[0].n
    if any(s.n != n for s in spectra):
        raise ValueError("all spectra must have the same size")
    pooled = np.concatenate([s.eigenvalues for s in spectra])
    pts, counts = np.unique(pooled, return_counts=True)
    cum = np.cumsum(counts) / pooled.size
    cum[-1] = 1.0
    return StepCdf(points=pts, cum=cum)


def write_spectrum_csv(spectrum: Spectrum, path, n: Optional[int] = None,
                       seed: Optional[int] = None) -> None:
    """One eigenvalue per row, with n and the source seed in the header."""
    n = spectrum.n if n is None else n
    seed = spectrum.seed if seed is None else seed
    with open(path, "w", newline="") as fh:
        fh.write(f"# n: {n}\n")
        fh.write(f"# seed: {seed}\n")
        writer = csv.writer(fh)
        writer.writerow(["eigenvalue"])
        for ev in spectrum.eigenvalues:
            writer.writerow([repr(float(ev))])
