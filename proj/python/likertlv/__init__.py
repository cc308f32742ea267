"""Signal, transient-error and measurement-error estimation for longitudinal Likert data.

Arrays of responses and latent values are shaped (subject, item, time); responses
are 1-based categories.
"""

from ._core import (
    EstimationError,
    InputError,
    autocorrelation,
    bivariate_norm_cdf,
    build_covariance,
    canonicalize,
    estimate_cuts,
    fit_cr,
    fit_pair,
    norm_cdf,
    norm_quantile,
    reconstruct,
    run_stem,
    run_study,
    simulate,
)

__all__ = [
    "EstimationError",
    "InputError",
    "autocorrelation",
    "bivariate_norm_cdf",
    "build_covariance",
    "canonicalize",
    "estimate_cuts",
    "fit_cr",
    "fit_pair",
    "norm_cdf",
    "norm_quantile",
    "reconstruct",
    "run_stem",
    "run_study",
    "simulate",
]
