"""Sequential random projection: dimension planner, incremental sketch,
anytime bounds and a seeded Monte Carlo harness (C++ core)."""

import json as _json

from ._core import (
    NumericError,
    Sketch,
    _run_experiment_json,
    boundary,
    check_beta_mgf,
    check_inner_product_law,
    check_sphere_mgf,
    check_trigger_identity,
    default_lambda_grid,
    exponential_supermartingale,
    inner_product_cdf,
    inner_product_law,
    log_mixture_value,
    mixture_value,
    plan_dimension,
    required_dimension,
    sample_sphere,
    union_bound_baseline,
)

__all__ = [
    "NumericError",
    "Sketch",
    "boundary",
    "check_beta_mgf",
    "check_inner_product_law",
    "check_sphere_mgf",
    "check_trigger_identity",
    "default_lambda_grid",
    "exponential_supermartingale",
    "inner_product_cdf",
    "inner_product_law",
    "log_mixture_value",
    "mixture_value",
    "plan_dimension",
    "required_dimension",
    "run_experiment",
    "sample_sphere",
    "union_bound_baseline",
]


def run_experiment(config, workers=0, with_trials=False):
    """Run an experiment described by a config dict (same schema as the CLI's
    JSON config). Returns {"report": ..., "trials": [...]} with trials only
    when requested."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _json.loads(_run_experiment_json(config, workers, with_trials))
