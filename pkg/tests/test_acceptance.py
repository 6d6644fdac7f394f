"""The eight acceptance criteria, each at its stated tolerance.

Every test prints one PASS/FAIL line (visible with ``-s``); the same lines are
repeated in an "acceptance criteria" section of the terminal summary.
"""

import math
import time

import numpy as np
import pytest
from scipy import special as sp

from pcircle.analysis import beta_scan, fit_growth_exponent, sweep
from pcircle.genbessel import PExponent, j0p_quad, jomega_quad, jomega_series
from pcircle.identity import hardy_partial, kn_series_check, theorem_residual, theorem_series_rhs
from pcircle.lattice import d_cal_closed, d_cal_quad, scaling_check

RESULTS = []


def report(n, ok, detail, t0):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}  ({time.perf_counter() - t0:.1f} s)"
    RESULTS.append(line)
    print("\n" + line)
    return ok


def test_criterion_1_p2_reduction():
    t0 = time.perf_counter()
    # 25 points with |eta| <= 10, spread over radius and angle
    radii = np.linspace(0.0, 10.0, 25)
    angles = np.linspace(0.0, 2 * math.pi, 25, endpoint=False) * 7 % (2 * math.pi)
    grid = [(r * math.cos(a), r * math.sin(a)) for r, a in zip(radii, angles)]
    worst = 0.0
    for w in (0.0, 0.5, 1.0, 2.0):
        for eta in grid:
            worst = max(worst, abs(jomega_quad(2, w, eta).value - sp.jv(w, math.hypot(*eta))))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and elapsed <= 60
    assert report(1, ok, f"max |J_w^[2] - J_w| = {worst:.2e} (<= 1e-8)", t0)


def test_criterion_2_series_vs_quadrature():
    t0 = time.perf_counter()
    etas = [(0.0, 0.0), (0.5, 0.2), (1.0, -1.0), (2.0, 3.0), (-3.5, 0.0), (4.0, 4.0), (5.0, -2.5), (0.0, 5.0), (-5.0, -5.0)]
    worst = 0.0
    for p in (0.5, 1.0, 2.0, 3.0):
        for w in (0.0, 1.0, 2.0):
            for eta in etas:
                worst = max(worst, abs(jomega_series(p, w, eta).value - jomega_quad(p, w, eta).value))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-7 and elapsed <= 300
    assert report(2, ok, f"max |series - quad| = {worst:.2e} (<= 1e-7)", t0)


def test_criterion_3_closed_form_vs_integral():
    t0 = time.perf_counter()
    worst = 0.0
    cells = 0
    for p in (0.5, 1.0, 2.0, 3.0):
        for b in (0.0, 0.75, 2.0):
            for s in (1.0, 2.3):
                for x in ((0.0, 0.0), (0.3, 0.1)):
                    worst = max(worst, abs(d_cal_closed(p, b, s, x) - d_cal_quad(p, b, s, x).value))
                    cells += 1
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and elapsed <= 600
    assert report(3, ok, f"{cells} cells, max |closed - quad| = {worst:.2e} (<= 1e-6)", t0)


CASES_4 = [
    (2, 1, 1.5, (0.0, 0.0)),
    (2, 2, 1.5, (0.0, 0.0)),
    (1, 2, 0.5, (0.25, 0.0)),
    (3, 2, 2.2, (0.1, 0.4)),
    (0.5, 3, 1.2, (0.0, 0.0)),
]


def test_criterion_4_theorem_residual():
    t0 = time.perf_counter()
    notes = []
    ok = True
    for p, b, s, x in CASES_4:
        rep = theorem_residual(p, b, s, x, 40)
        bound = max(1e-3, 3 * rep.tail_bound)
        good = abs(rep.residual) <= bound
        note = f"({p},{b},{s},{x}) |res|={abs(rep.residual):.2e} vs {bound:.2e}"
        if b >= 2:
            decay = rep.shell_magnitudes[4] / rep.shell_magnitudes[39]
            good = good and decay >= 1e4
            note += f" decay={decay:.3g}"
        ok = ok and good
        notes.append(note + ("" if good else " !"))
    anchor = theorem_residual(2, 1, 1.5, (0.0, 0.0), 1).lhs
    ok = ok and abs(anchor - (-0.03429)) <= 5e-6
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed <= 900
    assert report(4, ok, f"lhs anchor {anchor:.5f}; " + "; ".join(notes), t0)


def test_criterion_5_integrability_threshold():
    t0 = time.perf_counter()
    scan = beta_scan(2, [0.0, 0.25, 1.0, 2.0], (1, 2, 4, 8, 16))
    ok = scan.decaying[1.0] and scan.decaying[2.0] and not scan.decaying[0.0] and not scan.decaying[0.25]
    ok = ok and abs(scan.slopes[1.0] - (-0.5)) <= 0.15
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed <= 600
    slopes = ", ".join(f"b={b}: {v:+.3f}" for b, v in scan.slopes.items())
    assert report(5, ok, f"ring slopes {slopes}", t0)


def test_criterion_6_gauss_circle_diagnostic():
    t0 = time.perf_counter()
    fit = fit_growth_exponent(sweep(2, np.geomspace(10, 2000, 500)))
    elapsed = time.perf_counter() - t0
    ok = fit.window_max_slope <= 0.75 and elapsed <= 120
    assert report(6, ok, f"window_max_slope = {fit.window_max_slope:.3f} (<= 0.75)", t0)


def test_criterion_7_hardy_identity():
    t0 = time.perf_counter()
    ok = True
    notes = []
    for r in (0.5, 1.3, 2.5):
        rep = hardy_partial(r, 10**4)
        res = [abs(rep.lhs - v) for n, v in rep.trace if n >= 10]
        falls = sum(b < a for a, b in zip(res, res[1:]))
        good = len(res) == 4 and falls >= 2
        if r == 0.5:
            good = good and res[-1] <= 0.05
        ok = ok and good
        notes.append(f"r={r}: {falls}/3 decades fall, final {res[-1]:.2e}")
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed <= 300
    assert report(7, ok, "; ".join(notes), t0)


def test_criterion_8_exact_constants():
    t0 = time.perf_counter()
    ok = abs(PExponent(2).area_const - math.pi) <= 1e-12
    for p in (0.5, 1.0, 2.0, 3.0):
        ok = ok and abs(j0p_quad(p, (0.0, 0.0)).value - (2 / p) ** 2 / math.gamma(2 / p)) <= 1e-12
    checks = [scaling_check(2, 1, 4, (0.1, 0.2)), scaling_check(1, 0.5, 2.7, (0, 0)), scaling_check(3, 2, 10, (0.4, 0.4))]
    ok = ok and max(checks) <= 1e-9
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed <= 1.0
    assert report(8, ok, f"area_const, J0 at origin, scaling max {max(checks):.1e}", t0)


def test_p2_cross_identity():
    # companion check to criterion 4: the p = 2 route through classical Bessel functions
    t0 = time.perf_counter()
    a = kn_series_check(2, 1.5, (0.0, 0.0), 20).rhs_truncated
    b = theorem_series_rhs(2, 2, 1.5, (0.0, 0.0), 20).rhs_truncated
    assert abs(a - b) <= 1e-9, f"{a} vs {b} ({time.perf_counter() - t0:.1f} s)"
