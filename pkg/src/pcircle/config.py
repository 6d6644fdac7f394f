"""Numerical constants shared by the library, the tests and the CLI."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # quadrature
    quad_tol: float = 1e-10
    quad_max_evals: int = 2**20
    # series paths of the generalized Bessel functions
    series_tol: float = 1e-16
    series_max_k: int = 400
    series_envelope: float = 30.0  # |eta|_inf limit for the series path
    series_switch: float = 8.0  # |eta|_1 below which jomega_normalized uses the series
    # classical Bessel: power series below 25 + alpha**2, Hankel expansion above
    bessel_crossover_base: float = 25.0
    # lattice enumeration
    boundary_guard: float = 1e-12
    enumeration_budget: int = 10**9
    # identity verification
    identity_abs_floor: float = 1e-3
    identity_tail_factor: float = 3.0
    # growth-exponent fits
    window_ratio: float = 1.25
    min_fit_samples: int = 10


DEFAULTS = Tolerances()
