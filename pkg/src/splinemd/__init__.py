"""Operator-based empirical mode decomposition on a B-spline backbone."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .basis import (
    BasisEnv,
    Spline,
    bspline_deriv,
    bspline_value,
    extended_knots,
    knots_from_times,
    pointwise_leq,
    spline_eval,
    sup_norm_bound,
)
from .emd import Decomposition, EmdConfig, ImfComponent, count_interior_extrema, decompose, emd_step, sift_step
from .envelope import (
    EnvelopeConfig,
    TangentPointSet,
    classic_upper_envelope,
    iterative_slope_upper_envelope,
    lower_envelope,
    slope_match_points,
)
from .errors import (
    DegenerateSystemError,
    EnvelopeError,
    FitError,
    FrequencyExtractionError,
    SoulSingularityError,
    SplinemdError,
)
from .fitting import FitConfig, SampleSeries, extend_boundary, fit
from .operators import (
    Characteristic,
    ImfSoul,
    OmegaSystem,
    apply_full_operator,
    apply_unit_amplitude_operator,
    build_omega_system,
    canonical_cost,
    characteristic,
    extract_frequency,
    fit_unit_oscillation,
    frequency_from_omega,
    imf_eval,
    is_imf_soul,
    leakage_cost,
    solve_omega,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "BasisEnv",
    "Spline",
    "bspline_deriv",
    "bspline_value",
    "extended_knots",
    "knots_from_times",
    "pointwise_leq",
    "spline_eval",
    "sup_norm_bound",
    "Decomposition",
    "EmdConfig",
    "ImfComponent",
    "count_interior_extrema",
    "decompose",
    "emd_step",
    "sift_step",
    "EnvelopeConfig",
    "TangentPointSet",
    "classic_upper_envelope",
    "iterative_slope_upper_envelope",
    "lower_envelope",
    "slope_match_points",
    "DegenerateSystemError",
    "EnvelopeError",
    "FitError",
    "FrequencyExtractionError",
    "SoulSingularityError",
    "SplinemdError",
    "FitConfig",
    "SampleSeries",
    "extend_boundary",
    "fit",
    "Characteristic",
    "ImfSoul",
    "OmegaSystem",
    "apply_full_operator",
    "apply_unit_amplitude_operator",
    "build_omega_system",
    "canonical_cost",
    "characteristic",
    "extract_frequency",
    "fit_unit_oscillation",
    "frequency_from_omega",
    "imf_eval",
    "is_imf_soul",
    "leakage_cost",
    "solve_omega",
]
