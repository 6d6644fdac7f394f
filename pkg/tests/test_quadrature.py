import math

import numpy as np
import pytest

from pcircle.errors import DomainError, NonConvergence
from pcircle.quadrature import (
    QuadResult,
    integrate_01_singular,
    integrate_interval,
    integrate_rect2d,
)
from pcircle.special import beta


def test_beta_weight_half_half_is_pi():
    r = integrate_01_singular(lambda t: np.ones_like(t), -0.5, -0.5, 1e-13)
    assert r.value == pytest.approx(math.pi, abs=1e-13)


def test_beta_weight_matches_beta_function():
    # 4.5627... (the beta function at (0.25, 0.7))
    r = integrate_01_singular(lambda t: np.ones_like(t), -0.75, -0.3, 1e-12)
    assert r.value == pytest.approx(beta(0.25, 0.7), rel=1e-12)
    assert r.value == pytest.approx(4.5627293037039424, rel=1e-12)


def test_substitution_closed_form():
    r = integrate_01_singular(lambda t: np.cos(10 * np.sqrt(t)), -0.5, 0.0, 1e-12)
    assert r.value == pytest.approx(2 * math.sin(10) / 10, abs=1e-12)


def test_oscillatory_weighted_integral():
    # mpmath tanh-sinh, 300 subintervals: -0.010466973232605949
    r = integrate_01_singular(lambda t: np.cos(200 * t ** (1 / 3)), -2 / 3, -2 / 3, 1e-13, min_level=8)
    assert r.value == pytest.approx(-0.010466973232605949, abs=1e-14)


def test_complement_is_accurate():
    # (1-t)^(-0.999) weight near t = 1 needs 1 - t without cancellation
    r = integrate_01_singular(lambda t, tc: np.ones_like(t), 0.0, -0.9, 1e-12, with_complement=True)
    assert r.value == pytest.approx(10.0, rel=1e-11)


def test_batched_integrand():
    ks = np.array([1.0, 2.0, 3.0])
    r = integrate_01_singular(lambda t: np.multiply.outer(ks, t) ** 2, 0.0, 0.0, 1e-13)
    assert np.allclose(r.value, ks**2 / 3, atol=1e-13)


def test_exponent_domain():
    with pytest.raises(DomainError):
        integrate_01_singular(lambda t: t, -1.0, 0.0)


def test_nonconvergence_carries_partial():
    with pytest.raises(NonConvergence) as exc:
        integrate_01_singular(lambda t: np.cos(1e4 * t), 0.0, 0.0, 1e-15, max_evals=200)
    assert exc.value.partial is not None


def test_quadresult_rejects_negative_error():
    with pytest.raises(ValueError):
        QuadResult(1.0, -1.0, 3)


CALIBRATION = [
    # (f, a, b, truth) with weight t^a (1-t)^b
    (lambda t: np.ones_like(t), -0.5, -0.5, math.pi),
    (lambda t: t, 0.0, 0.0, 0.5),
    (lambda t: np.exp(t), 0.0, 0.0, math.e - 1),
    (lambda t: np.cos(10 * np.sqrt(t)), -0.5, 0.0, 2 * math.sin(10) / 10),
    (lambda t: np.ones_like(t), -0.75, -0.3, beta(0.25, 0.7)),
    (lambda t: np.ones_like(t), 1.5, 2.5, beta(2.5, 3.5)),
    (lambda t: np.sin(math.pi * t), 0.0, 0.0, 2 / math.pi),
    (lambda t: 1 / (1 + t), 0.0, 0.0, math.log(2)),
    (lambda t: np.log1p(t), -0.5, 0.0, 2 * math.log(2) - 4 + math.pi),
    (lambda t: t**3, -0.9, -0.9, beta(3.1, 0.1)),
]


@pytest.mark.parametrize("case", range(len(CALIBRATION)))
def test_error_estimate_is_honest(case):
    f, a, b, truth = CALIBRATION[case]
    r = integrate_01_singular(f, a, b, 1e-10)
    assert abs(r.value - truth) <= 10 * r.error_estimate + 1e-15 * abs(truth)


@pytest.mark.parametrize("case", range(len(CALIBRATION)))
def test_halving_tol_does_not_hurt(case):
    f, a, b, truth = CALIBRATION[case]
    prev = math.inf
    for tol in [1e-4, 5e-5, 2.5e-5, 1e-6, 5e-7, 1e-9, 5e-10]:
        err = abs(integrate_01_singular(f, a, b, tol).value - truth)
        # allow rounding-level wobble once converged
        assert err <= max(prev, 4e-15 * max(1.0, abs(truth)))
        prev = err


def test_rect2d_examples():
    assert integrate_rect2d(lambda x, y: np.ones_like(y), 0, 1, 0, 1).value == pytest.approx(1.0, abs=1e-12)
    r = integrate_rect2d(lambda x, y: np.exp(-x - y), 0, 1, 0, 1)
    assert r.value == pytest.approx((1 - math.exp(-1)) ** 2, abs=1e-12)


def test_rect2d_one_circle_area():
    def f(x, y):
        return (np.abs(x) + np.abs(y) < 1).astype(float)

    def y_breaks(x):
        return (-(1 - abs(x)), 1 - abs(x))

    r = integrate_rect2d(f, -1, 1, -1, 1, 1e-10, x_breaks=(0.0,), y_breaks=y_breaks)
    assert r.value == pytest.approx(2.0, abs=1e-10)


def test_interval_with_jump_needs_break():
    r = integrate_interval(lambda x: (x > 0.123456).astype(float), 0, 1, 1e-12, breaks=(0.123456,))
    assert r.value == pytest.approx(1 - 0.123456, abs=1e-12)


@pytest.mark.parametrize("deg", range(7))
def test_singular_rule_agrees_with_rect2d_slices(deg):
    rng = np.random.default_rng(deg)
    c = rng.normal(size=deg + 1)
    poly = np.polynomial.Polynomial(c)
    one = integrate_01_singular(lambda t: poly(t), 0.0, 0.0, 1e-14).value
    two = integrate_rect2d(lambda x, y: poly(x) * np.ones_like(y), 0, 1, 0, 1, 1e-14).value
    assert one == pytest.approx(two, abs=1e-12)
