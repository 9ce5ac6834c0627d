"""Hyperbolic-parabolic vasculogenesis model: spectra, decay rates, nonlinear runs."""

from ._vasclab import (
    Config,
    ConfigError,
    DomainError,
    FitError,
    NumericError,
    StabilityError,
    __version__,
    fit_decay,
    generator,
    kappa_select,
    linear_decay_curve,
    propagator,
    roots,
    simulate,
    stability,
    theory_exponent,
    verify,
)

__all__ = [
    "Config",
    "ConfigError",
    "DomainError",
    "FitError",
    "NumericError",
    "StabilityError",
    "__version__",
    "fit_decay",
    "generator",
    "kappa_select",
    "linear_decay_curve",
    "propagator",
    "roots",
    "simulate",
    "stability",
    "theory_exponent",
    "verify",
]
