"""Generalized momentum methods: mirror maps, coefficient schedules,
discrete runs, continuous flows, and the conserved-quantity diagnostics."""

from ._core import (
    ConfigError,
    DivergenceError,
    MirrorMap,
    Objective,
    Schedule,
    Trace,
    Trajectory,
    build_schedule,
    check,
    fit_rate,
    make_logistic,
    make_quadratic,
    run,
    serialize_config,
    simulate,
    structural_identity_residual,
)

__all__ = [
    "ConfigError",
    "DivergenceError",
    "MirrorMap",
    "Objective",
    "Schedule",
    "Trace",
    "Trajectory",
    "build_schedule",
    "check",
    "fit_rate",
    "make_logistic",
    "make_quadratic",
    "run",
    "serialize_config",
    "simulate",
    "structural_identity_residual",
]
