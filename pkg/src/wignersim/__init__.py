"""Wigner matrix simulation and semicircle-law convergence diagnostics.

Submodules:
  ensemble   entry laws, truncation pipeline, matrix sampling
  spectra    eigensolver, empirical spectral distributions, sup distance
  law        semicircle density/CDF/quantile/Stieltjes transform
  resolvent  empirical transforms and leave-one-out diagnostics
  bounds     executable distance/variance/moment/exceedance inequalities
  harness    seeded parallel Monte Carlo runs, rate fits, persistence
  cli        the `wignersim` command line front end
"""

__version__ = "0.1.0"

from ._kernels import ACCELERATED
from .ensemble import (EntryDistribution, SymmetricMatrix, WignerSpec,
                       make_distribution, sample_wigner,
                       truncate_center_rescale)
from .law import (SemicircleLaw, UpperHalfPoint, integral_bound_value, sc_cdf,
                  sc_pdf, sc_quantile, sc_stieltjes)
from .spectra import (Spectrum, StepCdf, eigenvalues, esd, esd_eval,
                      kolmogorov_distance, mean_esd, tridiagonalize)
from .resolvent import (LeaveOneOutDiag, empirical_stieltjes, leave_one_out,
                        leave_one_out_all, quadratic_form_residual,
                        rank_one_perturbation_gap, resolvent_trace)
from .bounds import (BaiConstants, BoundReport, bai_rhs, beta_exceedance_check,
                     moment_bound_check, stability_across, validate_constants,
                     variance_bound_check)
from .harness import (EnsembleConfig, RateFit, ReplicaSet, RunConfig,
                      delta_n_estimate, export, load_export, rate_fit,
                      replica_seed, run_replicas, summarize_deltas)

__all__ = [
    "ACCELERATED",
    "__version__",
    "EntryDistribution", "SymmetricMatrix", "WignerSpec",
    "make_distribution", "sample_wigner", "truncate_center_rescale",
    "SemicircleLaw", "UpperHalfPoint", "integral_bound_value",
    "sc_cdf", "sc_pdf", "sc_quantile", "sc_stieltjes",
    "Spectrum", "StepCdf", "eigenvalues", "esd", "esd_eval",
    "kolmogorov_distance", "mean_esd", "tridiagonalize",
    "LeaveOneOutDiag", "empirical_stieltjes", "leave_one_out",
    "leave_one_out_all", "quadratic_form_residual",
    "rank_one_perturbation_gap", "resolvent_trace",
    "BaiConstants", "BoundReport", "bai_rhs", "beta_exceedance_check",
    "moment_bound_check", "stability_across", "validate_constants",
    "variance_bound_check",
    "EnsembleConfig", "RateFit", "ReplicaSet", "RunConfig",
    "delta_n_estimate", "export", "load_export", "rate_fit",
    "replica_seed", "run_replicas", "summarize_deltas",
]
