"""Generalized Bessel functions and lattice points in p-circles."""

from .errors import (
    DegenerateTermError,
    DomainError,
    InsufficientData,
    NonConvergence,
    PCircleError,
    PreconditionError,
    ResourceError,
)
from .genbessel import (
    EvalResult,
    PExponent,
    PlanePoint,
    j0p_quad,
    j0p_series,
    jomega_normalized,
    jomega_quad,
    jomega_series,
    kratzel_j,
)
from .lattice import (
    LatticePoint,
    SweepRecord,
    count_lattice,
    d_cal_closed,
    d_cal_quad,
    d_sum,
    error_term,
    scaling_check,
    two_squares_count,
)
from .identity import (
    IdentityReport,
    hardy_partial,
    kn_series_check,
    second_main_term,
    theorem_residual,
    theorem_series_rhs,
)
from .analysis import ExponentFit, beta_scan, fit_growth_exponent
from .quadrature import QuadResult, integrate_01_singular, integrate_rect2d
from .special import GammaValue, bessel_j, beta, gamma, log_gamma

__version__ = "0.1.0"
