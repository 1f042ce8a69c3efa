"""Bias-corrected confidence intervals for the winner of a cross-validated model selection."""

import json as _json

from ._core import (
    EstimateResult,
    EstimationError,
    Error,
    InputError,
    PredictionMatrix,
    accuracy,
    auc,
    bbc,
    bbc_f,
    ci_from_bootstrap,
    empirical_quantile,
    exact_binomial_test,
    fold_performance,
    mu_from_auc,
    naive_bootstrap,
    normal_cdf,
    normal_quantile,
    read_prediction_csv,
    run_benchmark_json as _core_run_benchmark,
    simulate,
    write_prediction_csv,
)


def run_benchmark(spec, jobs=1):
    """Run a benchmark grid described by a dict; returns the report as a dict."""
    return _json.loads(_core_run_benchmark(_json.dumps(spec), jobs))


def estimate(pm, method="bbc-f", **kwargs):
    """Dispatch to bbc, bbc_f or naive_bootstrap by name."""
    fn = {"bbc": bbc, "bbc-f": bbc_f, "bbc_f": bbc_f, "nb": naive_bootstrap, "naive": naive_bootstrap}
    if method not in fn:
        raise InputError(f"unknown method {method!r} (expected bbc, bbc-f or nb)")
    return fn[method](pm, **kwargs)


__version__ = "0.1.0"
