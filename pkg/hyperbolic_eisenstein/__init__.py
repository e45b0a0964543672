"""
Eisenstein series on Fuchsian groups of the second kind.

Provides group presets with discreteness certificates, hyperbolic, weight-q,
parabolic, Patterson and θ/η̂ Eisenstein series, automorphic resolvent
kernels, and the numerical checks that tie them together.
"""

from hyperbolic_eisenstein.analysis import (
    apply_maass,
    apply_weighted_laplacian,
    composition_identity_residual,
    degeneration_diagnostic,
    duality_check,
    functional_equation_residual,
    integrate_form_along_cycle,
    intersection_number,
    l2_norm_estimate,
)
from hyperbolic_eisenstein.exceptions import (
    ConfigError,
    ConvergenceError,
    DiscretenessError,
    DomainError,
    HyperbolicEisensteinError,
    PoleError,
)
from hyperbolic_eisenstein.group import build_preset, counting_report, explicit_group
from hyperbolic_eisenstein.resolvent import (
    cusp_limit_identity,
    free_resolvent_w2,
    funnel_limit_identity,
    group_resolvent,
    select_kernel_convention,
)
from hyperbolic_eisenstein.series import (
    alpha_series,
    hyperbolic_eisenstein,
    infinite_geodesic_series,
    parabolic_eisenstein,
    patterson_eisenstein,
    weight_q_series,
)
from hyperbolic_eisenstein.specfun import b_factor, k_factor
from hyperbolic_eisenstein.types import (
    FormValue,
    FuchsianGroup,
    JobConfig,
    Matrix2,
    PointH,
    PresetName,
    SeriesEvaluation,
    SeriesFamily,
    TruncationPolicy,
)

__all__ = [
    "apply_maass",
    "apply_weighted_laplacian",
    "composition_identity_residual",
    "degeneration_diagnostic",
    "duality_check",
    "functional_equation_residual",
    "integrate_form_along_cycle",
    "intersection_number",
    "l2_norm_estimate",
    "ConfigError",
    "ConvergenceError",
    "DiscretenessError",
    "DomainError",
    "HyperbolicEisensteinError",
    "PoleError",
    "build_preset",
    "counting_report",
    "explicit_group",
    "cusp_limit_identity",
    "free_resolvent_w2",
    "funnel_limit_identity",
    "group_resolvent",
    "select_kernel_convention",
    "alpha_series",
    "hyperbolic_eisenstein",
    "infinite_geodesic_series",
    "parabolic_eisenstein",
    "patterson_eisenstein",
    "weight_q_series",
    "b_factor",
    "k_factor",
    "FormValue",
    "FuchsianGroup",
    "JobConfig",
    "Matrix2",
    "PointH",
    "PresetName",
    "SeriesEvaluation",
    "SeriesFamily",
    "TruncationPolicy",
]

__version__ = "0.1.0"
