import math

import numpy as np
import pytest

from pcircle.errors import DomainError, PreconditionError
from pcircle.identity import (
    IdentityReport,
    geometric_tail,
    hardy_partial,
    identity_lhs,
    kn_series_check,
    second_main_term,
    second_main_terms,
    shell,
    theorem_residual,
    theorem_series_rhs,
)
from pcircle.genbessel import kratzel_j
from pcircle.lattice import d_cal_closed
from pcircle.special import gamma

# d_sum = 3.5 by enumeration, Dcal = pi s^2 / 2 at x = 0
LHS_P2_B1 = 3.5 - math.pi * 1.5**2 / 2


def test_shell_points():
    for N in range(1, 6):
        pts = shell(N)
        assert len(pts) == 8 * N
        assert np.all(np.max(np.abs(pts), axis=1) == N)
        assert len({tuple(p) for p in pts}) == 8 * N


def test_geometric_tail():
    assert geometric_tail([8.0, 4.0, 2.0]) == pytest.approx(2.0 * 0.5 / 0.5)
    assert geometric_tail([1.0, 2.0, 3.0]) == math.inf
    assert geometric_tail([1.0, 2.0]) == math.inf


def test_lhs_anchor():
    assert identity_lhs(2, 1, 1.5, (0, 0)) == pytest.approx(LHS_P2_B1, abs=1e-13)
    assert LHS_P2_B1 == pytest.approx(-0.03429173528851739, abs=1e-15)


def test_lhs_single_point():
    # only the origin is inside, contributing s^beta / Gamma(beta + 1)
    lhs = identity_lhs(1, 2, 0.5, (0.25, 0))
    assert lhs == pytest.approx(0.5**2 / gamma(3) - d_cal_closed(1, 2, 0.5, (0.25, 0)), abs=1e-14)


def test_residual_p2_beta1():
    rep = theorem_residual(2, 1, 1.5, (0, 0), 40)
    assert rep.lhs == pytest.approx(LHS_P2_B1, abs=1e-13)
    assert abs(rep.residual) <= max(1e-3, 3 * rep.tail_bound)
    assert rep.passed()


def test_residual_p3():
    rep = theorem_residual(3, 2, 2.2, (0.1, 0.4), 30)
    assert abs(rep.residual) <= 3 * rep.tail_bound


def test_residual_shrinks_with_cutoff_for_beta2():
    for args in [(2, 2, 1.5, (0, 0)), (3, 2, 2.2, (0.1, 0.4))]:
        r10 = theorem_residual(*args, 10)
        r40 = theorem_residual(*args, 40)
        assert abs(r40.residual) <= abs(r10.residual)


def test_report_invariants():
    rep = theorem_series_rhs(2, 2, 1.5, (0.1, -0.2), 8)
    assert math.isnan(rep.lhs)
    assert [c for c, _ in rep.trace] == list(range(1, 9))
    assert rep.trace[-1][1] == rep.rhs_truncated
    assert all(m >= 0 for m in rep.shell_magnitudes)
    assert rep.tail_bound >= 0


def test_torus_enforced():
    for x in [(0.7, 0), (-0.5, 0), (0, 0.51)]:
        with pytest.raises(PreconditionError):
            theorem_residual(2, 1, 1.5, x, 5)
    theorem_series_rhs(2, 1, 1.5, (0.5, 0.5), 1)


def test_passed_rejects_unusable_tail():
    rep = IdentityReport(1.0, 0.9, math.inf, 0.1, 5, [])
    assert not rep.passed()
    rep = IdentityReport(1.0, 0.9995, math.inf, 0.0005, 5, [])
    assert rep.passed()


def test_kn_single_term():
    # shell 1 at x = 0 holds n = (1, 0) and its images
    s, beta = 1.5, 1.0
    rep = kn_series_check(beta, s, (0, 0), 1)
    assert rep.term_agreement <= 1e-10


def test_kn_symmetry_at_origin():
    from pcircle.identity import kn_terms
    from pcircle.genbessel import as_point

    pts = shell(1)
    terms = kn_terms(1.0, 0.5, as_point((0, 0)), pts)
    axis = terms[np.sum(np.abs(pts), axis=1) == 1]
    diag = terms[np.sum(np.abs(pts), axis=1) == 2]
    assert np.ptp(axis) <= 1e-12 and np.ptp(diag) <= 1e-12
    rep = kn_series_check(1.0, 0.5, (0, 0), 1)
    assert rep.rhs_truncated == pytest.approx(4 * axis[0] + 4 * diag[0], abs=1e-14)


def test_kn_matches_general_route():
    rep = kn_series_check(0.75, 1, (0.3, 0.3), 20)
    general = theorem_series_rhs(2, 0.75, 1, (0.3, 0.3), 20)
    assert rep.term_agreement <= 1e-10
    assert rep.rhs_truncated == pytest.approx(general.rhs_truncated, abs=1e-9)
    assert abs(rep.residual) <= 3 * rep.tail_bound


def test_kn_requires_beta_above_half():
    with pytest.raises(DomainError):
        kn_series_check(0.5, 1, (0, 0), 3)


def test_hardy_examples():
    rep = hardy_partial(0.5, 1000)
    assert rep.lhs == pytest.approx(1 - math.pi / 4, abs=1e-14)
    assert [n for n, _ in rep.trace] == [10, 100, 1000]
    rep = hardy_partial(2.5, 100)
    assert rep.lhs == pytest.approx(21 - math.pi * 6.25, abs=1e-12)


def test_hardy_trend_r13():
    rep = hardy_partial(1.3, 10**4)
    assert rep.lhs == pytest.approx(5 - math.pi * 1.69, abs=1e-12)
    res = [abs(rep.lhs - v) for _, v in rep.trace]
    assert res[-1] < res[0]


def test_hardy_rejects_integer_radius_squared():
    with pytest.raises(PreconditionError):
        hardy_partial(math.sqrt(2), 100)
    with pytest.raises(DomainError):
        hardy_partial(-1, 100)


def test_second_main_term_single_term():
    const = 8 * math.sqrt(math.pi) * gamma(4 / 3)
    direct = const / math.pi * kratzel_j(3, 2 / 3, 2 * math.pi).value
    assert second_main_term(3, 1, 1).value == pytest.approx(direct, rel=1e-14)
    # 30-digit mpmath value of the Kratzel factor
    assert kratzel_j(3, 2 / 3, 2 * math.pi).value == pytest.approx(-0.198184837065640547, abs=1e-12)


def test_second_main_term_size():
    # |Psi| against r^(1 - 1/p), constant fitted on a few radii
    vals = [abs(second_main_term(3, r, 200).value) / r ** (2 / 3) for r in (2.0, 5.0, 9.0)]
    assert all(math.isfinite(v) for v in vals)
    assert max(vals) <= 10 * min(vals)


def test_second_main_term_tail_decays():
    # terms decay roughly like n^(-5/4); the tail is not small at n = 50
    terms = np.abs(second_main_terms(4, 0.1, 50))
    assert terms[40:].max() < terms[:10].max()


def test_second_main_term_domain():
    with pytest.raises(DomainError):
        second_main_term(2, 1, 10)
