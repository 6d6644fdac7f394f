"""Deterministic quadrature on (0, 1) with algebraic endpoint weights, and on compact boxes.

``integrate_01_singular`` is a double-exponential (tanh-sinh) rule.  The weight
t^a (1-t)^b is applied by the rule itself in log space, using the accurate
complement 1 - t that the transformation provides for free, so nodes that sit
1e-300 away from an endpoint still get correct weights.  Levels halve the step
until two successive estimates agree to ``tol``.

Integrands are vectorised: ``f`` receives a 1-D array of nodes and returns an
array whose *last* axis runs over those nodes.  Leading axes are a batch, which
is how the generalized Bessel code integrates hundreds of parameter values on
one shared node set.

``integrate_interval`` is a globally adaptive Gauss-Legendre rule used where
the integrand is smooth apart from isolated kinks; ``integrate_rect2d`` nests
it.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import DEFAULTS
from .errors import DomainError, NonConvergence

_EPS = np.finfo(float).eps
_H0 = 0.5
_TAIL_LOG = 52.0  # weights below exp(-52) of the peak are dropped


@dataclass(frozen=True)
class QuadResult:
    value: object  # float, or ndarray for batched integrands
    error_estimate: object
    evaluations: int

    def __post_init__(self):
        if np.any(np.asarray(self.error_estimate) < 0):
            raise ValueError("negative error estimate")


def _half_width(left, right):
    # beyond this |x| the weight t^(a+1) (1-t)^(b+1) is below exp(-_TAIL_LOG)
    return math.asinh(_TAIL_LOG / (math.pi * min(left + 1.0, right + 1.0))) + 0.25


@lru_cache(maxsize=256)
def _level_nodes(left, right, level):
    """Nodes added at ``level`` and their log weights (without the step h)."""
    X = _half_width(left, right)
    if level == 0:
        k = np.arange(-math.floor(X / _H0), math.floor(X / _H0) + 1)
        x = k * _H0
    else:
        h = _H0 / 2**level
        kmax = math.floor((X / h - 1.0) / 2.0)
        k = np.arange(-kmax - 1, kmax + 1)
        x = (2 * k + 1) * h
    u = math.pi * np.sinh(x)
    log_t = -np.logaddexp(0.0, -u)
    log_tc = -np.logaddexp(0.0, u)
    log_w = np.log(math.pi * np.cosh(x)) + (left + 1.0) * log_t + (right + 1.0) * log_tc
    t = np.exp(log_t)
    tc = np.exp(log_tc)
    w = np.exp(log_w)
    for arr in (t, tc, w):
        arr.setflags(write=False)
    return t, tc, w


def level_for_frequency(freq):
    """Smallest level whose central node spacing resolves cos(freq * t)."""
    level = 3
    while _H0 / 2**level * (1.0 + abs(freq)) > 1.5 and level < 14:
        level += 1
    return level


def integrate_01_singular(
    f,
    sing_exponent_left,
    sing_exponent_right,
    tol=None,
    *,
    with_complement=False,
    max_evals=None,
    min_level=3,
):
    """Integrate f(t) t^a (1-t)^b over (0, 1) with a, b > -1.

    ``f`` must be bounded on (0, 1) and accept an array of nodes; with
    ``with_complement=True`` it is called as ``f(t, 1 - t)`` with the
    complement computed without cancellation.  Returns a :class:`QuadResult`;
    raises :class:`NonConvergence` if ``tol`` is not met within ``max_evals``
    node evaluations.
    """
    a = float(sing_exponent_left)
    b = float(sing_exponent_right)
    if not (a > -1.0 and b > -1.0):
        raise DomainError(f"endpoint exponents must exceed -1, got ({a}, {b})")
    tol = DEFAULTS.quad_tol if tol is None else float(tol)
    max_evals = DEFAULTS.quad_max_evals if max_evals is None else int(max_evals)

    total = None
    abs_total = None
    evals = 0
    prev_value = None
    err = None
    level = 0
    while True:
        t, tc, w = _level_nodes(a, b, level)
        fv = f(t, tc) if with_complement else f(t)
        fv = np.asarray(fv, dtype=float)
        contrib = fv @ w if fv.ndim > 0 else fv * w.sum()
        abs_contrib = np.abs(fv) @ w if fv.ndim > 0 else abs(fv) * w.sum()
        total = contrib if total is None else total + contrib
        abs_total = abs_contrib if abs_total is None else abs_total + abs_contrib
        evals += t.size
        h = _H0 / 2**level
        value = h * total
        if prev_value is not None:
            floor = 16.0 * _EPS * h * abs_total
            err = np.maximum(np.abs(value - prev_value), floor)
            # a tol below the rounding floor is met once levels agree to rounding
            if level >= min_level and np.all(err <= np.maximum(tol, floor)):
                return QuadResult(_squeeze(value), _squeeze(err), evals)
        if evals >= max_evals:
            partial = QuadResult(
                _squeeze(value), _squeeze(err if err is not None else np.abs(value)), evals
            )
            raise NonConvergence(
                f"tanh-sinh did not reach tol={tol:g} within {evals} evaluations "
                f"(estimate {np.max(partial.error_estimate):.3g})",
                partial,
            )
        prev_value = value
        level += 1


def _squeeze(v):
    v = np.asarray(v)
    return float(v) if v.ndim == 0 else v


# --------------------------------------------------------------------------
# adaptive Gauss-Legendre

_GL_N = 10
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_N)


def _gl_panels(f, lo, hi):
    """Gauss-Legendre estimate on each panel [lo_i, hi_i] in a single f call."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    nodes = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    vals = np.asarray(f(nodes), dtype=float)
    batch = vals.shape[:-1]
    vals = vals.reshape(batch + (lo.size, _GL_N))
    return (vals @ _GL_W) * half, nodes.size


def integrate_interval(f, a, b, tol=None, *, max_evals=None, initial_panels=1, breaks=()):
    """Globally adaptive Gauss-Legendre integral of a vectorised f over [a, b].

    Each panel's error is |G(panel) - G(left half) - G(right half)|; panels are
    bisected until the summed error is below ``tol``.  Jumps must be passed in
    ``breaks``: a jump lying between a panel edge and its outermost node is
    invisible to the error estimate.
    """
    tol = DEFAULTS.quad_tol if tol is None else float(tol)
    max_evals = DEFAULTS.quad_max_evals if max_evals is None else int(max_evals)
    inner = sorted(float(x) for x in breaks if a < x < b)
    knots = [a, *inner, b]
    edges = np.concatenate(
        [np.linspace(lo, hi, initial_panels + 1)[:-1] for lo, hi in zip(knots[:-1], knots[1:])] + [[b]]
    )
    lo, hi = edges[:-1], edges[1:]
    whole, evals = _gl_panels(f, lo, hi)
    done_value = 0.0
    done_err = 0.0
    while True:
        mid = 0.5 * (lo + hi)
        halves, n = _gl_panels(f, np.concatenate([lo, mid]), np.concatenate([mid, hi]))
        evals += n
        m = lo.size
        left, right = halves[..., :m], halves[..., m:]
        refined = left + right
        err = np.abs(whole - refined)
        if err.ndim > 1:
            err = err.max(axis=tuple(range(err.ndim - 1)))
        total_err = done_err + err.sum()
        if total_err <= tol:
            value = done_value + refined.sum(axis=-1)
            return QuadResult(_squeeze(value), float(max(total_err, _EPS * np.max(np.abs(value)))), evals)
        if evals >= max_evals:
            value = done_value + refined.sum(axis=-1)
            raise NonConvergence(
                f"adaptive Gauss-Legendre did not reach tol={tol:g} ({total_err:.3g})",
                QuadResult(_squeeze(value), float(total_err), evals),
            )
        # bisect the panels carrying the error, retire the rest
        share = tol / (4.0 * m)
        split = err > share
        if not np.any(split):
            split = err >= err.max()
        keep = ~split
        done_value = done_value + refined[..., keep].sum(axis=-1)
        done_err += err[keep].sum()
        lo_s, mid_s, hi_s = lo[split], mid[split], hi[split]
        lo = np.concatenate([lo_s, mid_s])
        hi = np.concatenate([mid_s, hi_s])
        whole = np.concatenate([left[..., split], right[..., split]], axis=-1)


def integrate_rect2d(f, a, b, c, d, tol=None, *, max_evals=None, x_breaks=(), y_breaks=None):
    """Integrate f(x, y) over [a, b] x [c, d] by nested adaptive Gauss-Legendre.

    ``f(x, y)`` is called with scalar x and an array y.  A discontinuity along
    a curve must be described by ``y_breaks(x)`` (the y values where the inner
    integrand jumps) and ``x_breaks`` (kinks of the inner integral).
    """
    tol = DEFAULTS.quad_tol if tol is None else float(tol)
    max_evals = DEFAULTS.quad_max_evals if max_evals is None else int(max_evals)
    inner_tol = tol / (4.0 * max(b - a, 1.0))
    count = [0]

    def outer(xs):
        out = np.empty(xs.size)
        for i, x in enumerate(xs):
            yb = () if y_breaks is None else y_breaks(x)
            r = integrate_interval(lambda y: f(x, y), c, d, inner_tol, max_evals=max_evals, breaks=yb)
            count[0] += r.evaluations
            out[i] = r.value
        if count[0] > max_evals:
            raise NonConvergence(f"2-D quadrature exceeded {max_evals} evaluations")
        return out

    res = integrate_interval(outer, a, b, tol / 2.0, max_evals=max_evals, breaks=x_breaks)
    return QuadResult(res.value, res.error_estimate + inner_tol * (b - a), count[0])
