"""Numerical verification of lattice-sum identities.

The main one expresses the lattice discrepancy as a sum over the dual lattice,

    D_beta(s:x) - Dcal_beta(s:x) = sum_{n != 0} Dcal_beta(s:x - n)
        = s^(beta + 2/p) p^(beta + 1) Gamma(1/p)^2
          * sum_{n != 0} J_(beta+1)^p(2 pi s^(1/p) (x - n)) / |2 pi s^(1/p) (x - n)|_p^(beta+1),

for x in the torus cell (-1/2, 1/2]^2.  The right side is summed over square
shells max(|n1|, |n2|) = 1, 2, ..., cutoff.  Also here: the p = 2 form with
classical Bessel functions, Hardy's identity for P_2(r), and Krätzel's second
main term for p > 2.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULTS
from .errors import DomainError, PreconditionError
from .genbessel import EvalResult, as_pexponent, as_point, kratzel_j
from .lattice import d_cal_closed, d_cal_closed_many, d_sum, error_term, two_squares_count
from .special import bessel_j, gamma


@dataclass(frozen=True)
class IdentityReport:
    lhs: float
    rhs_truncated: float
    tail_bound: float  # heuristic, see the module functions
    residual: float  # lhs - rhs_truncated, never clamped
    cutoff: int
    trace: list  # (cutoff, partial_sum) pairs
    shell_magnitudes: list = field(default_factory=list)  # sum of |term| per shell
    term_agreement: object = None  # max term difference between two evaluation paths

    def passed(self, abs_floor=None, tail_factor=None):
        abs_floor = DEFAULTS.identity_abs_floor if abs_floor is None else abs_floor
        tail_factor = DEFAULTS.identity_tail_factor if tail_factor is None else tail_factor
        if not math.isfinite(self.tail_bound):
            # an unusable tail estimate must not pass the check by default
            return abs(self.residual) <= abs_floor
        return abs(self.residual) <= max(abs_floor, tail_factor * self.tail_bound)

    def as_dict(self):
        return {
            "lhs": self.lhs,
            "rhs_truncated": self.rhs_truncated,
            "tail_bound": self.tail_bound,
            "residual": self.residual,
            "cutoff": self.cutoff,
            "trace": [list(t) for t in self.trace],
            "shell_magnitudes": list(self.shell_magnitudes),
            "term_agreement": self.term_agreement,
        }


def in_torus(x):
    return all(-0.5 < c <= 0.5 for c in x)


def _check_torus(x):
    x = as_point(x)
    if not in_torus(x):
        raise PreconditionError(f"x = ({x.eta1}, {x.eta2}) must lie in the torus cell (-1/2, 1/2]^2")
    return x


def _check_cutoff(cutoff):
    cutoff = int(cutoff)
    if cutoff < 1:
        raise DomainError("cutoff must be at least 1")
    return cutoff


def shell(N):
    """Integer points with max(|n1|, |n2|) = N in lexicographic order."""
    if N == 0:
        return np.zeros((1, 2), dtype=np.int64)
    r = np.arange(-N, N + 1)
    pts = np.concatenate(
        [
            np.stack([np.full(r.size, -N), r], axis=1),
            np.stack([np.full(r.size, N), r], axis=1),
            np.stack([r[1:-1], np.full(r.size - 2, -N)], axis=1),
            np.stack([r[1:-1], np.full(r.size - 2, N)], axis=1),
        ]
    )
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    return pts[order]


def geometric_tail(magnitudes):
    """Tail estimate from the last three shell magnitudes extrapolated geometrically.

    Heuristic: with ratio q = sqrt(S_N / S_(N-2)) the tail is S_N q / (1 - q);
    a non-shrinking sequence gives infinity.
    """
    if len(magnitudes) < 3:
        return math.inf
    a, _, c = magnitudes[-3:]
    if c == 0.0:
        return 0.0
    if a <= 0.0 or c >= a:
        return math.inf
    q = math.sqrt(c / a)
    return c * q / (1.0 - q)


def _shell_terms(p, beta, s, x, cutoff):
    pts = [shell(N) for N in range(1, cutoff + 1)]
    allpts = np.concatenate(pts)
    xs = np.array([x.eta1, x.eta2]) - allpts
    vals, errs = d_cal_closed_many(p, beta, s, xs)
    bounds = np.cumsum([0] + [len(q) for q in pts])
    return [(pts[i], vals[bounds[i] : bounds[i + 1]]) for i in range(cutoff)], float(errs.sum())


def _summarise(shells):
    trace = []
    mags = []
    partial = []
    for N, (_, terms) in enumerate(shells, start=1):
        partial.append(math.fsum(terms))
        mags.append(math.fsum(np.abs(terms)))
        trace.append((N, math.fsum(partial)))
    return trace, mags


def theorem_series_rhs(p, beta, s, x, cutoff):
    """Right side summed over shells 1..cutoff, with no left side attached (lhs is nan)."""
    p = as_pexponent(p)
    x = _check_torus(x)
    cutoff = _check_cutoff(cutoff)
    shells, _ = _shell_terms(p, beta, s, x, cutoff)
    trace, mags = _summarise(shells)
    rhs = trace[-1][1]
    return IdentityReport(math.nan, rhs, geometric_tail(mags), math.nan, cutoff, trace, mags)


def identity_lhs(p, beta, s, x):
    """D_beta(s:x) - Dcal_beta(s:x) from enumeration and the closed form."""
    return d_sum(p, beta, s, x).value.real - d_cal_closed(p, beta, s, x)


def theorem_residual(p, beta, s, x, cutoff):
    """Full two-sided check: lattice sum minus integral against the shell series."""
    rhs = theorem_series_rhs(p, beta, s, x, cutoff)
    lhs = identity_lhs(p, beta, s, x)
    return IdentityReport(
        lhs, rhs.rhs_truncated, rhs.tail_bound, lhs - rhs.rhs_truncated, rhs.cutoff, rhs.trace, rhs.shell_magnitudes
    )


def kn_terms(beta, s, x, points):
    """Classical p = 2 terms s^(beta+1) 2^(beta+1) pi J_(beta+1)(z) / z^(beta+1), z = 2 pi sqrt(s) |x - n|."""
    omega = beta + 1.0
    pref = s**omega * 2.0**omega * math.pi
    out = np.empty(len(points))
    for i, (n1, n2) in enumerate(points):
        z = 2.0 * math.pi * math.sqrt(s) * math.hypot(x.eta1 - n1, x.eta2 - n2)
        out[i] = pref * bessel_j(omega, z) / z**omega
    return out


def kn_series_check(beta, s, x, cutoff):
    """p = 2 series with classical Bessel functions, compared term by term with the general route."""
    beta = float(beta)
    if not beta > 0.5:
        raise DomainError(f"the classical p = 2 series needs beta > 1/2, got {beta}")
    x = _check_torus(x)
    cutoff = _check_cutoff(cutoff)
    general, _ = _shell_terms(as_pexponent(2.0), beta, s, x, cutoff)
    shells = []
    worst = 0.0
    for pts, terms in general:
        classical = kn_terms(beta, s, x, pts)
        worst = max(worst, float(np.max(np.abs(classical - terms))))
        shells.append((pts, classical))
    trace, mags = _summarise(shells)
    lhs = identity_lhs(2.0, beta, s, x)
    rhs = trace[-1][1]
    return IdentityReport(lhs, rhs, geometric_tail(mags), lhs - rhs, cutoff, trace, mags, worst)


def _decade_marks(n_max):
    marks = []
    m = 10
    while m < n_max:
        marks.append(m)
        m *= 10
    marks.append(n_max)
    return marks


def hardy_partial(r, n_max):
    """Partial sums of r sum_{n <= n_max} R(n)/sqrt(n) J_1(2 pi sqrt(n) r) against P_2(r).

    The trace holds partial sums at n = 10, 100, ... and n_max.  Convergence
    is conditional and slow; tail_bound is the change over the last decade, a
    heuristic.
    """
    r = float(r)
    n_max = int(n_max)
    if not (r > 0.0 and math.isfinite(r)):
        raise DomainError(f"r must be positive, got {r}")
    if n_max < 1:
        raise DomainError("n_max must be at least 1")
    r2 = r * r
    if abs(r2 - round(r2)) <= DEFAULTS.boundary_guard * max(1.0, r2) and round(r2) > 0:
        raise PreconditionError(f"r^2 = {r2} is an integer; the identity excludes these radii")
    lhs = error_term(2.0, r).error
    marks = set(_decade_marks(n_max))
    terms = []
    trace = []
    for n in range(1, n_max + 1):
        count = two_squares_count(n)
        if count:
            terms.append(r * count / math.sqrt(n) * bessel_j(1.0, 2.0 * math.pi * math.sqrt(n) * r))
        if n in marks:
            trace.append((n, math.fsum(terms)))
    rhs = trace[-1][1]
    tail = abs(rhs - trace[-2][1]) if len(trace) > 1 else math.inf
    return IdentityReport(lhs, rhs, tail, lhs - rhs, n_max, trace)


def second_main_term(p, r, n_max, tol=None):
    """Partial sum of 8 sqrt(pi) Gamma(1 + 1/p) sum_n (r/(pi n)) J_(2/p)^(p)(2 pi n r) for p > 2.

    The error estimate is the magnitude of the last term, a heuristic tail
    indicator.
    """
    p = float(p.p if hasattr(p, "p") else p)
    r = float(r)
    n_max = int(n_max)
    if not p > 2.0:
        raise DomainError(f"second_main_term is for p > 2, got {p}")
    if not r > 0.0:
        raise DomainError(f"r must be positive, got {r}")
    if n_max < 1:
        raise DomainError("n_max must be at least 1")
    terms = second_main_terms(p, r, n_max, tol)
    return EvalResult(math.fsum(terms), abs(terms[-1]), "series")


def second_main_terms(p, r, n_max, tol=None):
    const = 8.0 * math.sqrt(math.pi) * gamma(1.0 + 1.0 / p)
    nu = 2.0 / p
    return np.array(
        [const * (r / (math.pi * n)) * kratzel_j(p, nu, 2.0 * math.pi * n * r, tol).value for n in range(1, n_max + 1)]
    )
