"""Monte Carlo orchestration: seeded parallel replicas, rate fits, persistence.

A run is described by a RunConfig (JSON-serializable).  Replica r at size n is
seeded by hashing (master seed, n, r) through numpy's SeedSequence, so results
are identical whatever the worker count or completion order; workers are
threads and the eigensolver kernel releases the GIL.  Every output file opens
with a metadata header carrying the config hash, the master seed and the
package version, and nothing else in the file depends on wall-clock time.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .ensemble import (EntryDistribution, WignerSpec, make_distribution,
                       sample_wigner, truncate_center_rescale)
from .law import SemicircleLaw
from .resolvent import empirical_stieltjes_grid
from .spectra import Spectrum, esd, kolmogorov_distance, mean_esd

__all__ = [
    "ConfigError",
    "EnsembleConfig",
    "RunConfig",
    "ReplicaSet",
    "RatePoint",
    "RateFit",
    "replica_seed",
    "run_replicas",
    "summarize_deltas",
    "rate_fit",
    "delta_n_estimate",
    "export",
    "load_export",
]


class ConfigError(ValueError):
    """Raised for malformed run configurations; mapped to CLI exit code 2."""


@dataclass(frozen=True)
class EnsembleConfig:
    """Entry-law recipe for a run: kinds, sigma, and the truncation switch."""

    offdiag: dict = field(default_factory=lambda: {"kind": "gaussian"})
    diag: Optional[dict] = None
    sigma: float = 1.0
    truncate: bool = False

    def label(self) -> str:
        off = self.offdiag.get("kind", "?")
        tag = "+trunc" if self.truncate else ""
        return f"{off}{tag}(sigma={self.sigma})"

    def _base(self, spec: dict) -> EntryDistribution:
        kwargs = {k: spec[k] for k in ("df", "p") if k in spec}
        try:
            return make_distribution(spec["kind"], **kwargs)
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad entry-law spec {spec}: {exc}") from exc

    def distributions(self, n: int) -> tuple[EntryDistribution, EntryDistribution]:
        """(offdiag, diag) laws prepared for size n (truncation depends on n)."""
        off = self._base(self.offdiag)
        diag = self._base(self.diag if self.diag is not None else self.offdiag)
        diag = diag.scaled_to(self.sigma)
        if self.truncate:
            off = truncate_center_rescale(off, n)
            diag = truncate_center_rescale(diag, n)
        return off, diag


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs; JSON keys mirror the field names."""

    ensemble: EnsembleConfig = field(default_factory=EnsembleConfig)
    n_grid: tuple[int, ...] = (64, 128, 256)
    replicas: int = 20
    z_grid: tuple[tuple[float, float], ...] = ()
    checks: tuple[str, ...] = ()
    seed: int = 20260809
    workers: int = 0  # 0 means os.cpu_count()

    def __post_init__(self):
        if not self.n_grid or any(n < 1 for n in self.n_grid):
            raise ConfigError(f"n_grid must be non-empty positive ints: {self.n_grid}")
        if list(self.n_grid) != sorted(self.n_grid):
            raise ConfigError(f"n_grid must be ascending: {self.n_grid}")
        if self.replicas < 1:
            raise ConfigError(f"replicas must be >= 1, got {self.replicas}")
        for u, v in self.z_grid:
            if not v > 0.0:
                raise ConfigError(f"z-grid points need v > 0, got ({u}, {v})")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must fit in 64 unsigned bits")

    @property
    def effective_workers(self) -> int:
        return self.workers if self.workers > 0 else (os.cpu_count() or 1)

    def to_dict(self) -> dict:
        return {
            "ensemble": asdict(self.ensemble),
            "n_grid": list(self.n_grid),
            "replicas": self.replicas,
            "z_grid": [list(p) for p in self.z_grid],
            "checks": list(self.checks),
            "seed": self.seed,
            "workers": self.workers,
        }

    def config_hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(canon.encode()).hexdigest()[:12]

    @staticmethod
    def from_dict(raw: dict, **overrides) -> "RunConfig":
        data = dict(raw)
        data.update({k: v for k, v in overrides.items() if v is not None})
        ens = data.get("ensemble", {})
        if isinstance(ens, dict):
            if "kind" in ens and "offdiag" not in ens:
                ens = dict(ens)
                ens["offdiag"] = {
                    k: ens.pop(k) for k in ("kind", "df", "p") if k in ens
                }
            try:
                ens = EnsembleConfig(**ens)
            except TypeError as exc:
                raise ConfigError(f"bad ensemble config: {exc}") from exc
        try:
            return RunConfig(
                ensemble=ens,
                n_grid=tuple(int(n) for n in data.get("n_grid", (64, 128, 256))),
                replicas=int(data.get("replicas", 20)),
                z_grid=tuple(
                    (float(u), float(v)) for u, v in data.get("z_grid", ())
                ),
                checks=tuple(data.get("checks", ())),
                seed=int(data.get("seed", 20260809)),
                workers=int(data.get("workers", 0)),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad run config: {exc}") from exc

    @staticmethod
    def from_json(path, **overrides) -> "RunConfig":
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return RunConfig.from_dict(raw, **overrides)


def replica_seed(master: int, n: int, r: int) -> int:
    """64-bit stream seed for replica r at size n, derived from the master."""
    ss = np.random.SeedSequence(entropy=[int(master), int(n), int(r)])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass
class ReplicaSet:
    """Everything sampled in one run, keyed by matrix size."""

    config: RunConfig
    law: SemicircleLaw
    eigs: dict[int, np.ndarray]      # n -> (replicas, n) sorted rows
    sn: dict[int, np.ndarray]        # n -> (replicas, len(z_grid)) complex
    delta_p: dict[int, np.ndarray]   # n -> (replicas,)
    seeds: dict[int, np.ndarray]     # n -> (replicas,) uint64

    def spectra(self, n: int) -> list[Spectrum]:
        return [
            Spectrum(eigenvalues=row, seed=int(s))
            for row, s in zip(self.eigs[n], self.seeds[n])
        ]


def run_replicas(config: RunConfig) -> ReplicaSet:
    """Sample every (n, replica) task on a fixed-size worker pool.

    Results land in preallocated slots indexed by replica, so aggregate output
    does not depend on worker count or completion order.  Eigensolver failures
    propagate tagged with the (n, replica) pair.
    """
    law = SemicircleLaw(config.ensemble.sigma)
    zs = [complex(u, v) for u, v in config.z_grid]
    reps = config.replicas
    eigs: dict[int, np.ndarray] = {}
    sn: dict[int, np.ndarray] = {}
    delta_p: dict[int, np.ndarray] = {}
    seeds: dict[int, np.ndarray] = {}
    dists: dict[int, tuple[EntryDistribution, EntryDistribution]] = {}
    for n in config.n_grid:
        eigs[n] = np.empty((reps, n))
        sn[n] = np.empty((reps, len(zs)), dtype=np.complex128)
        delta_p[n] = np.empty(reps)
        seeds[n] = np.empty(reps, dtype=np.uint64)
        dists[n] = config.ensemble.distributions(n)

    from .spectra import eigenvalues as eig_solve  # local to avoid cycle at import

    def task(n: int, r: int) -> None:
        seed = replica_seed(config.seed, n, r)
        off, diag = dists[n]
        spec = WignerSpec(n=n, offdiag=off, diag=diag,
                          sigma=config.ensemble.sigma, seed=seed)
        spectrum = eig_solve(sample_wigner(spec))
        eigs[n][r] = spectrum.eigenvalues
        if zs:
            sn[n][r] = empirical_stieltjes_grid(spectrum.eigenvalues, zs)
        delta_p[n][r] = kolmogorov_distance(esd(spectrum), law)
        seeds[n][r] = seed

    jobs = [(n, r) for n in config.n_grid for r in range(reps)]
    workers = config.effective_workers
    if workers == 1:
        for n, r in jobs:
            _run_task(task, n, r)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_task, task, n, r) for n, r in jobs]
            for fut in futures:
                fut.result()
    return ReplicaSet(config=config, law=law, eigs=eigs, sn=sn,
                      delta_p=delta_p, seeds=seeds)


def _run_task(task, n: int, r: int) -> None:
    try:
        task(n, r)
    except Exception as exc:
        raise RuntimeError(f"replica (n={n}, r={r}) failed: {exc}") from exc


@dataclass(frozen=True)
class RatePoint:
    """Per-size summary of the sup-distance sample."""

    n: int
    median: float
    q25: float
    q75: float
    mean: float


def summarize_deltas(delta_by_n: dict[int, np.ndarray]) -> list[RatePoint]:
    points = []
    for n in sorted(delta_by_n):
        d = np.asarray(delta_by_n[n], dtype=np.float64)
        points.append(RatePoint(
            n=int(n),
            median=float(np.median(d)),
            q25=float(np.quantile(d, 0.25)),
            q75=float(np.quantile(d, 0.75)),
            mean=float(np.mean(d)),
        ))
    return points


@dataclass
class RateFit:
    """Log-log regression of the median sup distance against n."""

    points: list[RatePoint]
    slope: float
    intercept: float
    slope_se: float
    r_squared: float
    sqrt_n_median: list[float]
    degenerate: bool = False

    @property
    def witness_drift(self) -> float:
        vals = self.sqrt_n_median
        return max(vals) / min(vals)


def rate_fit(points: Sequence[RatePoint]) -> RateFit:
    """Least squares of log median against log n; needs at least 3 sizes."""
    points = sorted(points, key=lambda p: p.n)
    if len(points) < 3:
        raise ValueError(f"need at least 3 sizes for a rate fit, got {len(points)}")
    if any(p.median <= 0.0 for p in points):
        raise ValueError("medians must be positive for a log-log fit")
    x = np.log([p.n for p in points])
    y = np.log([p.median for p in points])
    m = len(points)
    xbar, ybar = x.mean(), y.mean()
    sxx = float(np.sum((x - xbar) ** 2))
    if sxx == 0.0:
        raise ValueError("all sizes equal; cannot fit a slope")
    slope = float(np.sum((x - xbar) * (y - ybar)) / sxx)
    intercept = float(ybar - slope * xbar)
    resid = y - (intercept + slope * x)
    rss = float(np.sum(resid ** 2))
    tss = float(np.sum((y - ybar) ** 2))
    degenerate = tss == 0.0
    if degenerate:
        slope_se = math.inf
        r_squared = 0.0
    else:
        slope_se = math.sqrt(rss / (m - 2) / sxx) if m > 2 else math.inf
        r_squared = 1.0 - rss / tss
    witness = [math.sqrt(p.n) * p.median for p in points]
    return RateFit(points=list(points), slope=slope, intercept=intercept,
                   slope_se=slope_se, r_squared=r_squared,
                   sqrt_n_median=witness, degenerate=degenerate)


def delta_n_estimate(spectra: Sequence[Spectrum], law: SemicircleLaw) -> float:
    """Sup distance of the replica-averaged ESD to the law."""
    spectra = list(spectra)
    if len(spectra) < 1:
        raise ValueError("need at least one spectrum")
    return kolmogorov_distance(mean_esd(spectra), law)


# ---------------------------------------------------------------------------
# persistence


def _meta_lines(meta: dict) -> dict:
    out = {"version": __version__}
    out.update(meta or {})
    return out


def _jsonable(obj):
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if isinstance(obj, RateFit):
        return {
            "points": [asdict(p) for p in obj.points],
            "slope": obj.slope,
            "intercept": obj.intercept,
            "slope_se": None if math.isinf(obj.slope_se) else obj.slope_se,
            "slope_se_infinite": math.isinf(obj.slope_se),
            "r_squared": obj.r_squared,
            "sqrt_n_median": obj.sqrt_n_median,
            "degenerate": obj.degenerate,
        }
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _csv_table(report) -> tuple[list[str], list[list]]:
    """Fixed column layouts for the tabular report types."""
    if isinstance(report, RateFit):
        header = ["n", "median", "q25", "q75", "sqrt_n_times_median"]
        rows = [
            [p.n, repr(p.median), repr(p.q25), repr(p.q75), repr(w)]
            for p, w in zip(report.points, report.sqrt_n_median)
        ]
        return header, rows
    d = _jsonable(report)
    if isinstance(d, dict) and d.get("grid") is not None:
        header = ["u", "v", "ratio"]
        ratio = d.get("ratio") or [None] * len(d["grid"])
        rows = [
            [repr(float(u)), repr(float(v)), repr(float(r))]
            for (u, v), r in zip(d["grid"], ratio)
        ]
        return header, rows
    if isinstance(d, dict):
        return ["key", "value"], [[k, json.dumps(v)] for k, v in sorted(d.items())]
    raise TypeError(f"no CSV layout for {type(report).__name__}")


def export(report, path, format: str = "json", meta: Optional[dict] = None) -> None:
    """Write a report with a metadata header; format is 'csv' or 'json'."""
    if format not in ("csv", "json"):
        raise ValueError(f"format must be 'csv' or 'json', got {format!r}")
    meta = _meta_lines(meta or {})
    if format == "json":
        with open(path, "w") as fh:
            json.dump({"meta": meta, "data": _jsonable(report)}, fh, indent=2)
            fh.write("\n")
        return
    header, rows = _csv_table(report)
    with open(path, "w", newline="") as fh:
        for key in sorted(meta):
            fh.write(f"# {key}: {meta[key]}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def load_export(path) -> dict:
    """Read back a file written by export(); CSV rows come back as strings."""
    path = str(path)
    if path.endswith(".json"):
        with open(path) as fh:
            return json.load(fh)
    meta = {}
    rows = []
    header: list[str] = []
    with open(path, newline="") as fh:
        plain = []
        for line in fh:
            if line.startswith("# "):
                key, _, value = line[2:].strip().partition(": ")
                meta[key] = value
            else:
                plain.append(line)
        reader = csv.reader(plain)
        table = list(reader)
    if table:
        header = table[0]
        rows = table[1:]
    return {"meta": meta, "header": header, "rows": rows}
