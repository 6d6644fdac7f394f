"""Lattice points inside p-circles and the Riesz-type sums over them.

R_p(r) counts m in Z^2 with |m1|^p + |m2|^p < r^p, P_p(r) is its deviation
from the area, and for beta > -1

    D_beta(s:x)   = 1/Gamma(beta+1) sum_{|m|_p^p < s} (s - |m|_p^p)^beta e^(2 pi i x.m)
    Dcal_beta(s:x) = 1/Gamma(beta+1) int_{|xi|_p^p < s} (s - |xi|_p^p)^beta e^(2 pi i x.xi) dxi

``d_cal_closed`` evaluates the integral through the generalized Bessel
function, ``d_cal_quad`` directly, so each checks the other.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import DEFAULTS
from .errors import DegenerateTermError, DomainError, NonConvergence, ResourceError
from .genbessel import as_pexponent, as_point, jomega_normalized_many
from .quadrature import QuadResult, integrate_01_singular, level_for_frequency
from .special import gamma, log_gamma

STRICT = "strict"
CLOSED = "closed"


@dataclass(frozen=True)
class LatticePoint:
    m1: int
    m2: int

    def p_norm_pow(self, p):
        p = p.p if hasattr(p, "p") else float(p)
        if p == int(p):
            return abs(self.m1) ** int(p) + abs(self.m2) ** int(p)
        return sum(math.exp(p * math.log(abs(m))) for m in (self.m1, self.m2) if m)


@dataclass(frozen=True)
class SweepRecord:
    p: float
    r: float
    count: int
    area: float
    error: float

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("count must be nonnegative")


@dataclass(frozen=True)
class LatticeSum:
    """D_beta with the imaginary part kept for the symmetry check."""

    value: complex
    magnitude: float  # sum of |term|
    points: int


def _check_s(s):
    s = float(s)
    if not (s > 0.0 and math.isfinite(s)):
        raise DomainError(f"s must be positive and finite, got {s}")
    return s


def _check_beta(beta):
    beta = float(beta)
    if not (beta > -1.0 and math.isfinite(beta)):
        raise DomainError(f"beta must exceed -1, got {beta}")
    return beta


def _check_boundary(boundary):
    if boundary not in (STRICT, CLOSED):
        raise DomainError(f"boundary must be 'strict' or 'closed', got {boundary!r}")
    return boundary


def _radius_bound(p, s):
    """Largest |m1| that can occur, padded by one against rounding."""
    budget = DEFAULTS.enumeration_budget
    log_extent = math.log(s) / p
    if 2.0 * log_extent > math.log(budget):
        raise ResourceError(
            f"s^(2/p) = {math.exp(2.0 * log_extent):.3g} exceeds the enumeration budget {budget:g}"
        )
    return int(math.floor(math.exp(log_extent))) + 1


def _int_pow(m, p):
    return m.astype(np.int64) ** p


def _pow_float(m, p):
    m = np.abs(np.asarray(m, dtype=float))
    with np.errstate(divide="ignore"):
        return np.where(m > 0, np.exp(p * np.log(np.where(m > 0, m, 1.0))), 0.0)


def _column_heights(p, s, boundary):
    """For m1 = 0..M the largest m2 >= 0 inside the region, or -1 if none."""
    M = _radius_bound(p.p, s)
    m1 = np.arange(M + 1)
    if p.is_integer and s < 2.0**60:
        k = int(p.p)
        # integer-exact: m1^k + m2^k < s  <=>  <= ceil(s) - 1
        limit = math.floor(s) if boundary == CLOSED else math.ceil(s) - 1
        rem = limit - _int_pow(m1, k)
        est = np.floor(np.maximum(rem, 0).astype(float) ** (1.0 / k)).astype(np.int64)
        for _ in range(3):
            est = np.where(_int_pow(est + 1, k) <= rem, est + 1, est)
            est = np.where((est > 0) & (_int_pow(est, k) > rem), est - 1, est)
        return np.where(rem >= 0, est, -1)
    guard = DEFAULTS.boundary_guard * max(1.0, s)
    v1 = _pow_float(m1, p.p)
    rem = s - v1
    est = np.floor(np.maximum(rem, 0.0) ** (1.0 / p.p))
    heights = np.full(m1.size, -1, dtype=np.int64)
    for delta in (-1, 0, 1, 2):
        cand = est + delta
        v = v1 + _pow_float(cand, p.p)
        inside = v < s - guard if boundary == STRICT else v <= s + guard
        ok = (cand >= 0) & inside
        heights = np.where(ok, np.maximum(heights, cand.astype(np.int64)), heights)
    return heights


def count_lattice(p, s, boundary=STRICT):
    """Number of m in Z^2 with |m1|^p + |m2|^p < s (strict) or <= s (closed).

    Integer p is exact in integer arithmetic; otherwise points within the
    guard band of the boundary count as on it.
    """
    p = as_pexponent(p)
    s = _check_s(s)
    boundary = _check_boundary(boundary)
    h = _column_heights(p, s, boundary)
    cols = np.where(h >= 0, 2 * h + 1, 0)
    return int(cols[0] + 2 * cols[1:].sum())


def error_term(p, r):
    """SweepRecord with R_p(r) (strict), the area term and P_p(r)."""
    p = as_pexponent(p)
    r = float(r)
    if not (r > 0.0 and math.isfinite(r)):
        raise DomainError(f"r must be positive, got {r}")
    count = count_lattice(p, r**p.p, STRICT)
    area = p.area_const * r * r
    return SweepRecord(p.p, r, count, area, count - area)


def _norm_pow(p, m1, m2):
    if p.is_integer:
        return (np.abs(m1) ** int(p.p) + np.abs(m2) ** int(p.p)).astype(float)
    return _pow_float(m1, p.p) + _pow_float(m2, p.p)


def _point_blocks(p, s, boundary, block=1 << 20):
    """Yield (m1, m2, |m|_p^p) arrays over whole columns, about ``block`` points each."""
    h = _column_heights(p, s, boundary)
    M = h.size - 1
    m1s = []
    m2s = []
    size = 0
    for a in range(-M, M + 1):
        top = h[abs(a)]
        if top >= 0:
            col = np.arange(-top, top + 1)
            m1s.append(np.full(col.size, a))
            m2s.append(col)
            size += col.size
        if m1s and (size >= block or a == M):
            m1 = np.concatenate(m1s)
            m2 = np.concatenate(m2s)
            yield m1, m2, _norm_pow(p, m1, m2)
            m1s, m2s, size = [], [], 0


def lattice_points(p, s, boundary=STRICT):
    """All lattice points inside the region as (m1, m2, |m|_p^p) arrays."""
    p = as_pexponent(p)
    s = _check_s(s)
    blocks = list(_point_blocks(p, s, _check_boundary(boundary), block=1 << 62))
    return tuple(np.concatenate(parts) for parts in zip(*blocks))


def d_sum(p, beta, s, x):
    """D_beta(s:x) with the imaginary part carried explicitly."""
    p = as_pexponent(p)
    beta = _check_beta(beta)
    s = _check_s(s)
    x = as_point(x)
    g = gamma(beta + 1.0)
    guard = DEFAULTS.boundary_guard * max(1.0, s)
    re, im, mag = [], [], []
    n = 0
    # streamed in column blocks so memory stays bounded for small p
    for m1, m2, v in _point_blocks(p, s, STRICT):
        gap = s - v
        if beta < 0.0:
            hit = np.abs(gap) <= guard
            if np.any(hit):
                i = int(np.flatnonzero(hit)[0])
                raise DegenerateTermError(
                    f"lattice point ({m1[i]}, {m2[i]}) lies on the boundary |m|_p^p = s = {s} "
                    f"and beta = {beta} < 0 makes its term singular"
                )
        weight = gap**beta / g
        phase = 2.0 * math.pi * (x.eta1 * m1 + x.eta2 * m2)
        re.append(math.fsum(weight * np.cos(phase)))
        im.append(math.fsum(weight * np.sin(phase)))
        mag.append(math.fsum(np.abs(weight)))
        n += m1.size
    return LatticeSum(complex(math.fsum(re), math.fsum(im)), math.fsum(mag), n)


def d_cal_closed_many(p, beta, s, xs):
    """Vectorised closed form of Dcal_beta(s:x) over an (N, 2) array of x.

    Dcal = s^(beta + 2/p) p^(beta + 1) Gamma(1/p)^2
           * J_(beta+1)^p(eta) / |eta|_p^(beta+1),   eta = 2 pi s^(1/p) x.
    Returns (values, error_estimates).
    """
    p = as_pexponent(p)
    beta = _check_beta(beta)
    s = _check_s(s)
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    etas = 2.0 * math.pi * s ** (1.0 / p.p) * xs
    vals, errs = jomega_normalized_many(p, beta + 1.0, etas)
    log_pref = (beta + 2.0 / p.p) * math.log(s) + (beta + 1.0) * math.log(p.p) + 2.0 * log_gamma(1.0 / p.p)
    pref = math.exp(log_pref)
    return pref * vals, pref * errs


def d_cal_closed(p, beta, s, x):
    """Dcal_beta(s:x) through the generalized Bessel function."""
    x = as_point(x)
    vals, _ = d_cal_closed_many(p, beta, s, [[x.eta1, x.eta2]])
    return float(vals[0])


@lru_cache(maxsize=None)
def _quadrant_signs():
    return np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])


def d_cal_quad(p, beta, s, x, tol=None):
    """Dcal_beta(s:x) from its defining integral, independent of the Bessel route.

    In each quadrant xi = (r t^(1/p), r (1-t)^(1/p)) has |xi|_p = r and
    dxi = (1/p) r t^(1/p-1) (1-t)^(1/p-1) dr dt.  With r = s^(1/p) v,

        Dcal = s^(beta + 2/p) / (p Gamma(beta+1))
               * int_0^1 (1-v)^beta v g(v)^beta int_0^1 w(t) sum_quadrants e^(2 pi i x.xi) dt dv,

    g(v) = (1 - v^p)/(1 - v).  Both levels are tanh-sinh, so the boundary
    factor is absorbed as an endpoint weight for every beta > -1.
    """
    p = as_pexponent(p)
    beta = _check_beta(beta)
    s = _check_s(s)
    x = as_point(x)
    tol = DEFAULTS.quad_tol if tol is None else float(tol)
    pp = p.p
    inv = 1.0 / pp
    R = s**inv
    pref = math.exp((beta + 2.0 * inv) * math.log(s) - log_gamma(beta + 1.0)) / pp
    signs = _quadrant_signs()
    k1 = 2.0 * math.pi * R * x.eta1 * signs[:, 0]
    k2 = 2.0 * math.pi * R * x.eta2 * signs[:, 1]
    level = level_for_frequency(2.0 * math.pi * R * (abs(x.eta1) + abs(x.eta2)) * max(1.0, inv))
    inner_tol = 0.25 * tol / pref
    inner_err = [0.0]

    def inner(v):
        def f(t, tc):
            a = np.multiply.outer(v, t**inv)
            b = np.multiply.outer(v, tc**inv)
            ph = k1[:, None, None] * a + k2[:, None, None] * b
            return np.stack([np.cos(ph).sum(axis=0), np.sin(ph).sum(axis=0)])

        res = integrate_01_singular(f, inv - 1.0, inv - 1.0, inner_tol, with_complement=True, min_level=level)
        inner_err[0] = max(inner_err[0], float(np.max(res.error_estimate)))
        return res.value

    def outer(v, vc):
        with np.errstate(divide="ignore"):
            log_v = np.where(v < 0.5, np.log(np.maximum(v, 1e-320)), np.log1p(-vc))
        safe = np.where(vc > 0.0, vc, 1.0)
        g = np.where(vc > 0.0, -np.expm1(pp * log_v) / safe, pp)
        return inner(v) * (v * g**beta)

    res = integrate_01_singular(outer, 0.0, beta, 0.5 * tol / pref, with_complement=True, min_level=level)
    re, im = pref * np.asarray(res.value)
    err = pref * (float(np.max(res.error_estimate)) + 4.0 * inner_err[0])
    if abs(im) > max(tol, err):
        raise NonConvergence(f"imaginary part {im:.3g} of the real integral exceeds tol {tol:g}")
    return QuadResult(float(re), err, res.evaluations)


def scaling_check(p, beta, s, x):
    """|Dcal(s:x) - s^(beta + 2/p) Dcal(1: s^(1/p) x)| with the closed form on both sides."""
    p = as_pexponent(p)
    beta = _check_beta(beta)
    s = _check_s(s)
    x = as_point(x)
    left = d_cal_closed(p, beta, s, x)
    right = s ** (beta + 2.0 / p.p) * d_cal_closed(p, beta, 1.0, x.scaled(s ** (1.0 / p.p)))
    return abs(left - right)


# --------------------------------------------------------------------------
# sums of two squares


def _factorize(n):
    factors = {}
    while n % 2 == 0:
        factors[2] = factors.get(2, 0) + 1
        n //= 2
    d = 3
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 2
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


@lru_cache(maxsize=1 << 16)
def two_squares_count(n):
    """r_2(n) = #{m in Z^2 : m1^2 + m2^2 = n} = 4 (d_1(n) - d_3(n))."""
    n = int(n)
    if n < 1:
        raise DomainError(f"two_squares_count needs n >= 1, got {n}")
    count = 4
    for q, e in _factorize(n).items():
        if q % 4 == 1:
            count *= e + 1
        elif q % 4 == 3 and e % 2:
            return 0
    return count


def two_squares_count_enum(n):
    """Enumeration r_2(n) for n <= 10^6, used to cross-check the factorization."""
    n = int(n)
    if not 1 <= n <= 10**6:
        raise DomainError("enumeration fallback covers 1 <= n <= 10^6")
    m = np.arange(math.isqrt(n) + 1)
    rest = n - m * m
    root = np.array([math.isqrt(int(r)) for r in rest])
    hit = root * root == rest
    # count signed pairs: zeros have one sign, others two
    signs1 = np.where(m == 0, 1, 2)
    signs2 = np.where(root == 0, 1, 2)
    return int(np.sum(hit * signs1 * signs2))
