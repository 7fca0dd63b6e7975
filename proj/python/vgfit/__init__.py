"""Symmetric variance-gamma distribution: sampling, moment and likelihood fits."""

from ._core import (
    CovMode,
    Estimator,
    FitResult,
    MleConfig,
    MomentSummary,
    Params,
    PopulationMoments,
    L,
    L_infinity,
    L_prime,
    cf,
    classic_cov,
    classic_mme,
    digamma,
    ell,
    feasibility_table,
    fit_mle,
    full_cov,
    log_bessel_k,
    log_gamma,
    log_pdf,
    modified_cov,
    modified_mme,
    neg_log_likelihood,
    pdf,
    population_moments,
    run_grid,
    sample,
    summarize,
)

__version__ = "0.1.0"


def fit(xs, method="modified-mme", known_m=None, config=None):
    """Fit a sample with one of "classic-mme", "modified-mme" or "mle"."""
    if method == "classic-mme":
        return classic_mme(summarize(xs, known_m))
    if method == "modified-mme":
        return modified_mme(summarize(xs, known_m))
    if method == "mle":
        return fit_mle(xs, config if config is not None else MleConfig(), known_m)
    raise ValueError(f"unknown method {method!r}")
