"""Python bindings for the gtransnet solver core."""

import json

from ._core import (
    Error,
    FeatureNetwork,
    InvalidArgument,
    NumericalError,
    build_network,
    contains,
    density_study,
    fit_sine,
    problem_names,
    sample_interior,
    solve_least_squares,
)
from . import _core

__all__ = [
    "Error",
    "FeatureNetwork",
    "InvalidArgument",
    "NumericalError",
    "build_network",
    "contains",
    "density_study",
    "fit_sine",
    "problem_names",
    "run_experiment",
    "run_sweep",
    "sample_interior",
    "solve_least_squares",
]


def _config_text(config):
    if isinstance(config, str):
        return config
    return json.dumps(config)


def run_experiment(config):
    """Runs one configured experiment; `config` is YAML text or a dict. Returns the report dict."""
    return json.loads(_core.run_experiment(_config_text(config)))


def run_sweep(config):
    """Runs the configured width sweep and returns the report dict."""
    return json.loads(_core.run_sweep(_config_text(config)))
