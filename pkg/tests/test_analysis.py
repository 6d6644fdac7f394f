import math

import numpy as np
import pytest

from pcircle.analysis import beta_scan, fit_growth_exponent, ring_integral, sweep
from pcircle.errors import DomainError, InsufficientData
from pcircle.lattice import d_cal_closed_many


RS = np.geomspace(10, 1000, 60)


def test_fit_constant_data():
    fit = fit_growth_exponent([(r, 3.0) for r in RS])
    assert abs(fit.slope) <= 1e-12
    assert fit.n_samples == 60


def test_fit_power_law():
    fit = fit_growth_exponent([(r, 2 * r**0.5) for r in RS])
    assert fit.slope == pytest.approx(0.5, abs=1e-6)
    assert fit.window_max_slope == pytest.approx(0.5, abs=1e-6)
    assert fit.intercept == pytest.approx(math.log(2), abs=1e-6)
    assert fit.r_squared == pytest.approx(1.0)


def test_fit_scale_equivariance():
    rng = np.random.default_rng(1)
    vals = RS**0.3 * rng.uniform(0.2, 1.0, RS.size)
    a = fit_growth_exponent(list(zip(RS, vals)))
    b = fit_growth_exponent(list(zip(RS, 7.5 * vals)))
    assert b.slope == pytest.approx(a.slope, abs=1e-9)
    assert b.window_max_slope == pytest.approx(a.window_max_slope, abs=1e-9)
    assert b.intercept == pytest.approx(a.intercept + math.log(7.5), abs=1e-9)


def test_fit_fixed_count_windows():
    fit = fit_growth_exponent([(r, r) for r in RS], window=6)
    assert fit.window_max_slope == pytest.approx(1.0, abs=1e-9)


def test_fit_needs_samples():
    with pytest.raises(InsufficientData):
        fit_growth_exponent([(r, 1.0) for r in RS[:5]])
    with pytest.raises(InsufficientData):
        fit_growth_exponent([(r, 0.0) for r in RS])


def test_fit_requires_increasing_r():
    with pytest.raises(DomainError):
        fit_growth_exponent([(r, 1.0) for r in RS[::-1]])
    with pytest.raises(DomainError):
        fit_growth_exponent([(r, 1.0) for r in RS], ratio=1.0)


def test_fit_on_sweep_records():
    recs = sweep(2, np.geomspace(10, 200, 60))
    fit = fit_growth_exponent(recs)
    assert fit.window_max_slope <= 1.0
    assert fit.n_samples <= 60


def test_ring_integral_matches_dense_polar_rule():
    # p = 2: ring integral is 2 pi int_R^2R |Dcal(1:rho)| rho drho
    R = 2.0
    rho = np.linspace(R, 2 * R, 4001)
    vals, _ = d_cal_closed_many(2, 1.0, 1.0, np.stack([rho, np.zeros_like(rho)], axis=1))
    f = np.abs(vals) * rho
    dense = 2 * math.pi * float(np.sum((f[1:] + f[:-1]) / 2 * np.diff(rho)))
    assert ring_integral(2, 1.0, R) == pytest.approx(dense, rel=0.02)


def test_beta_scan_p1_beta2_decays():
    scan = beta_scan(1, [2.0], (1, 2, 4, 8))
    assert scan.decaying[2.0]
    assert len(scan.table()) == 4
    assert all(r.status == "ok" for r in scan.rows)


def test_beta_scan_domain():
    with pytest.raises(DomainError):
        beta_scan(2, [-1.0])
    with pytest.raises(DomainError):
        beta_scan(2, [1.0], (2, 1))
