"""Attraction-repulsion Gibbs point processes: simulation, DMH inference and PCF diagnostics."""

from ._arpp import (
    ConfigError,
    DataError,
    NumericalError,
    Window,
    __version__,
    batch_means_mcse,
    default_bandwidth,
    fit,
    hpd,
    k_hat,
    log_h,
    pcf,
    phi,
    run,
    simulate,
    solve_knots,
)

__all__ = [
    "ConfigError",
    "DataError",
    "NumericalError",
    "Window",
    "__version__",
    "batch_means_mcse",
    "default_bandwidth",
    "fit",
    "hpd",
    "k_hat",
    "log_h",
    "pcf",
    "phi",
    "run",
    "simulate",
    "solve_knots",
]
