"""Signed-mixture mitigation of coherent rotation errors."""

from ._qpmix import (
    CapacityError,
    Circuit,
    ConfigError,
    GammaTriple,
    OutOfRegimeError,
    PauliString,
    UnsupportedError,
    estimate,
    estimate_unmitigated,
    exact_ideal_expectation,
    exact_mixture_expectation,
    exact_noisy_expectation,
    gamma_default,
    gamma_general,
    one_norm_closed_form,
    run_config,
    scan_ab,
    shot_bound,
    t_overhead,
    trotter_circuit,
    variance_bound,
)

__all__ = [
    "CapacityError",
    "Circuit",
    "ConfigError",
    "GammaTriple",
    "OutOfRegimeError",
    "PauliString",
    "UnsupportedError",
    "estimate",
    "estimate_unmitigated",
    "exact_ideal_expectation",
    "exact_mixture_expectation",
    "exact_noisy_expectation",
    "gamma_default",
    "gamma_general",
    "one_norm_closed_form",
    "run_config",
    "scan_ab",
    "shot_bound",
    "t_overhead",
    "trotter_circuit",
    "variance_bound",
]
