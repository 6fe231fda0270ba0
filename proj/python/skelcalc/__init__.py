"""Brownian skeleton calculus: exact random-walk skeletons, their Ito-type
decompositions, local times and fBm experiments."""

from ._skelcalc import (
    Estimate,
    UsageError,
    __version__,
    angle_bracket,
    covariation,
    crossing_brackets,
    decompose,
    energy,
    fbm_scan,
    intensity_h,
    local_time_curve,
    representation_residual,
    sample_tau,
    skeleton,
    tau_cdf,
    tau_density,
    tau_quantile,
    tau_survival,
)

__all__ = [
    "Estimate",
    "UsageError",
    "__version__",
    "angle_bracket",
    "covariation",
    "crossing_brackets",
    "decompose",
    "energy",
    "fbm_scan",
    "intensity_h",
    "local_time_curve",
    "representation_residual",
    "sample_tau",
    "skeleton",
    "tau_cdf",
    "tau_density",
    "tau_quantile",
    "tau_survival",
]
