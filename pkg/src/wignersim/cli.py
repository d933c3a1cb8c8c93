"""Command line front end.

Subcommands
  simulate   sample matrices and dump spectra as CSV
  rate       sup-distance decay experiment with a log-log slope fit
  variance   replica-variance and centered-moment bound checks on a z-grid
  bai        deterministic distance-bound check on fresh samples
  diag       leave-one-out diagnostic tables and the exceedance check
  lawcheck   closed-form law self-tests, including the fixed integral bound

Exit codes: 0 all checks passed, 1 at least one check failed, 2 bad usage or
configuration.  Every subcommand accepts --config/--seed/--workers/--out/
--format; command line flags override config-file values.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import bounds as bounds_mod
from . import law as law_mod
from .ensemble import WignerSpec, sample_wigner
from .harness import (ConfigError, RunConfig, delta_n_estimate, export,
                      rate_fit, replica_seed, run_replicas, summarize_deltas)
from .resolvent import diag_resolvent, leave_one_out_all, resolvent_trace, write_diag_csv
from .spectra import esd, eigenvalues, write_spectrum_csv

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

DEFAULT_Z_GRID = [
    [u, v] for v in (0.2, 0.5, 1.0) for u in (-3.0, -1.5, 0.0, 1.5, 3.0)
]

DEFAULTS = {
    "simulate": {"n_grid": [64], "replicas": 2},
    "rate": {"n_grid": [64, 128, 256], "replicas": 30},
    "variance": {"n_grid": [128, 256], "replicas": 200, "z_grid": DEFAULT_Z_GRID},
    "bai": {"n_grid": [256], "replicas": 20},
    "diag": {"n_grid": [64], "replicas": 100, "z_grid": [[0.0, 0.25], [0.0, 0.5]]},
    "lawcheck": {},
}

RATE_SLOPE_MAX = -0.45
RATE_WITNESS_FACTOR = 3.0
VARIANCE_CROSS_FACTOR = 2.0
BAI_CONSTANTS = (16.0, 3.0, 2.0)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wignersim",
        description="Wigner matrix simulation and semicircle-law diagnostics",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("simulate", "sample matrices and dump spectra"),
        ("rate", "sup-distance decay experiment"),
        ("variance", "variance/moment bound checks"),
        ("bai", "deterministic distance-bound check"),
        ("diag", "leave-one-out diagnostics"),
        ("lawcheck", "law self-tests"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=str, default=None,
                       help="JSON run configuration")
        p.add_argument("--seed", type=int, default=None,
                       help="master seed override")
        p.add_argument("--workers", type=int, default=None,
                       help="worker threads (default: cpu count)")
        p.add_argument("--out", type=str, default="wignersim-out",
                       help="output directory")
        p.add_argument("--format", type=str, default="json",
                       choices=("csv", "json"), help="report file format")
    return parser


def _load_config(args, command: str) -> RunConfig:
    overrides = {"seed": args.seed, "workers": args.workers}
    if args.config is not None:
        return RunConfig.from_json(args.config, **overrides)
    return RunConfig.from_dict(dict(DEFAULTS[command]), **overrides)


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _meta(config: RunConfig) -> dict:
    return {"seed": config.seed, "config_hash": config.config_hash()}


def _report_line(label: str, ok: bool, detail: str = "") -> bool:
    status = "PASS" if ok else "FAIL"
    print(f"[{label}] {status}{' ' + detail if detail else ''}")
    return ok


def _cmd_simulate(args) -> int:
    config = _load_config(args, "simulate")
    out = _outdir(args)
    replicas = run_replicas(config)
    for n in config.n_grid:
        for r, spectrum in enumerate(replicas.spectra(n)):
            write_spectrum_csv(spectrum, out / f"spectrum_n{n}_r{r}.csv")
    print(f"wrote {sum(len(replicas.eigs[n]) for n in config.n_grid)} spectra to {out}")
    return EXIT_PASS


def _cmd_rate(args) -> int:
    config = _load_config(args, "rate")
    out = _outdir(args)
    replicas = run_replicas(config)
    points = summarize_deltas(replicas.delta_p)
    fit = rate_fit(points)
    dn = {
        n: delta_n_estimate(replicas.spectra(n), replicas.law)
        for n in config.n_grid
    }
    suffix = "csv" if args.format == "csv" else "json"
    export(fit, out / f"ratefit.{suffix}", format=args.format, meta=_meta(config))
    ok_slope = fit.slope <= RATE_SLOPE_MAX
    ok_witness = fit.witness_drift <= RATE_WITNESS_FACTOR
    for p in points:
        print(f"  n={p.n:5d} median={p.median:.5f} "
              f"sqrt(n)*median={math.sqrt(p.n) * p.median:.4f} "
              f"delta_n={dn[p.n]:.5f}")
    ok = _report_line("rate-slope", ok_slope,
                      f"slope={fit.slope:.4f} (<= {RATE_SLOPE_MAX})")
    ok &= _report_line("rate-witness", ok_witness,
                       f"drift={fit.witness_drift:.3f} (<= {RATE_WITNESS_FACTOR})")
    return EXIT_PASS if ok else EXIT_FAIL


def _cmd_variance(args) -> int:
    config = _load_config(args, "variance")
    if not config.z_grid:
        raise ConfigError("variance checks need a non-empty z_grid")
    checks = config.checks or ("variance", "moment_l1", "moment_l2")
    out = _outdir(args)
    replicas = run_replicas(config)
    suffix = "csv" if args.format == "csv" else "json"
    ok = True
    for name in checks:
        reports = []
        for n in config.n_grid:
            if name == "variance":
                rep = bounds_mod.variance_bound_check(
                    replicas.sn[n], n, config.z_grid,
                    sigma=config.ensemble.sigma)
            elif name in ("moment_l1", "moment_l2"):
                rep = bounds_mod.moment_bound_check(
                    replicas.sn[n], n, int(name[-1]), config.z_grid)
            else:
                raise ConfigError(f"unknown check {name!r}")
            reports.append(rep)
            export(rep, out / f"{name}_n{n}.{suffix}", format=args.format,
                   meta=_meta(config))
            ok &= _report_line(
                f"{name} n={n}", rep.passed,
                f"max={rep.details['max_ratio']:.4g} "
                f"median={rep.details['median_ratio']:.4g}")
        if len(reports) > 1:
            stab = bounds_mod.stability_across(
                [r.details["max_ratio"] for r in reports],
                VARIANCE_CROSS_FACTOR)
            ok &= _report_line(
                f"{name} cross-n", stab["passed"],
                f"drift={stab['drift']:.3f} (<= {VARIANCE_CROSS_FACTOR})")
    return EXIT_PASS if ok else EXIT_FAIL


def _cmd_bai(args) -> int:
    config = _load_config(args, "bai")
    out = _outdir(args)
    a_const, b_const, eps_const = BAI_CONSTANTS
    suffix = "csv" if args.format == "csv" else "json"
    ok = True
    rows = []
    for n in config.n_grid:
        v = 2.0 / math.sqrt(n)
        constants = bounds_mod.validate_constants(a_const, b_const, eps_const, v)
        off, diag = config.ensemble.distributions(n)
        law = law_mod.SemicircleLaw(config.ensemble.sigma)
        for r in range(config.replicas):
            seed = replica_seed(config.seed, n, r)
            spec = WignerSpec(n=n, offdiag=off, diag=diag,
                              sigma=config.ensemble.sigma, seed=seed)
            report = bounds_mod.bai_rhs(esd(eigenvalues(sample_wigner(spec))),
                                        law, constants)
            rows.append((n, r, report))
            ok &= report.passed
    summary = {
        f"n{n}_r{r}": {"lhs": rep.lhs, "rhs": rep.rhs, "passed": rep.passed}
        for n, r, rep in rows
    }
    export(summary, out / f"bai.{suffix}", format=args.format,
           meta=_meta(config))
    worst = max(rep.lhs / rep.rhs for _, _, rep in rows)
    _report_line("bai-inequality", ok,
                 f"{len(rows)} samples, worst lhs/rhs={worst:.4f}")
    return EXIT_PASS if ok else EXIT_FAIL


def _cmd_diag(args) -> int:
    config = _load_config(args, "diag")
    if not config.z_grid:
        raise ConfigError("diag needs a non-empty z_grid")
    out = _outdir(args)
    n = config.n_grid[0]
    off, diag_law = config.ensemble.distributions(n)
    law_sigma = config.ensemble.sigma
    ok = True

    # identity table on one matrix at the first z
    z0 = complex(*config.z_grid[0])
    spec = WignerSpec(n=n, offdiag=off, diag=diag_law, sigma=law_sigma,
                      seed=replica_seed(config.seed, n, 0))
    matrix = sample_wigner(spec)
    sn0 = resolvent_trace(matrix, z0)
    diags = leave_one_out_all(matrix, z0, sn0)
    write_diag_csv(diags, out / f"leave_one_out_n{n}.csv")
    betas = np.array([d.beta for d in diags])
    resid_mean = abs(betas.mean() - sn0)
    resid_schur = float(np.max(np.abs(betas - diag_resolvent(matrix, z0))))
    w = matrix.to_dense()
    resid_ep = max(
        abs(d.eps - (w[d.index, d.index] - d.gamma / n + d.xi / n - (sn0 - sn0)))
        for d in diags
    )
    bounds_ok = all(all(d.bounds_ok().values()) for d in diags)
    ok &= _report_line("diag-identities",
                       max(resid_mean, resid_schur, resid_ep) <= 1e-10 and bounds_ok,
                       f"max residual={max(resid_mean, resid_schur, resid_ep):.2e}")

    # exceedance frequencies over replicas for each grid v
    suffix = "csv" if args.format == "csv" else "json"
    for u, v in config.z_grid:
        z = complex(u, v)
        pooled = []
        for r in range(config.replicas):
            seed = replica_seed(config.seed, n, r)
            m = sample_wigner(WignerSpec(n=n, offdiag=off, diag=diag_law,
                                         sigma=law_sigma, seed=seed))
            pooled.append(diag_resolvent(m, z))
        report = bounds_mod.beta_exceedance_check(np.concatenate(pooled), n, v)
        export(report, out / f"beta_exceedance_n{n}_v{v}.{suffix}",
               format=args.format, meta=_meta(config))
        regime = "" if report.details["in_regime"] else " (out of regime)"
        ok &= _report_line(
            f"beta-exceedance v={v}", report.passed,
            f"freq={report.lhs:.3e} scaled={report.details['scaled_frequency']:.3f}"
            + regime)
    return EXIT_PASS if ok else EXIT_FAIL


def _cmd_lawcheck(args) -> int:
    out = _outdir(args)
    ok = True
    value = law_mod.integral_bound_value()
    ok &= _report_line("integral-bound", value < 10.0,
                       f"value={value:.4f} (< 10)")
    law = law_mod.SemicircleLaw(1.0)
    from scipy import integrate as _integrate
    xs = np.linspace(-2.0, 2.0, 201)
    worst = 0.0
    for x in xs:
        ref, _ = _integrate.quad(law.pdf, -2.0, float(x), limit=200,
                                 epsabs=1e-13)
        worst = max(worst, abs(ref - law.cdf(float(x))))
    ok &= _report_line("cdf-quadrature", worst <= 1e-10,
                       f"max err={worst:.2e}")
    rng = np.random.default_rng(0)
    zs = rng.uniform(-16, 16, 2000) + 1j * rng.uniform(1e-3, 8.0, 2000)
    s = law_mod.sc_stieltjes(zs)
    resid = float(np.max(np.abs(s * s + zs * s + 1.0)))
    ok &= _report_line("stieltjes-root", resid <= 1e-12,
                       f"max residual={resid:.2e}")
    norm, _ = _integrate.quad(law.pdf, -2.0, 2.0, limit=200, epsabs=1e-13)
    ok &= _report_line("pdf-normalization", abs(norm - 1.0) <= 1e-10,
                       f"integral={norm:.12f}")
    law_mod.write_curve_csv(law, out / "semicircle_curve.csv")
    return EXIT_PASS if ok else EXIT_FAIL


_COMMANDS = {
    "simulate": _cmd_simulate,
    "rate": _cmd_rate,
    "variance": _cmd_variance,
    "bai": _cmd_bai,
    "diag": _cmd_diag,
    "lawcheck": _cmd_lawcheck,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
