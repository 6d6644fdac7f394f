"""Empirical growth exponents of P_p(r) and the integrability scan in beta.

Both are diagnostics.  A fitted slope is consistent with, never a proof of,
an O-estimate; a decaying ring integral is evidence, not a proof, that the
Riesz kernel Dcal_beta(1:y) is integrable on the plane.
"""

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULTS
from .errors import DomainError, InsufficientData, NonConvergence
from .genbessel import as_pexponent
from .lattice import d_cal_closed_many, d_cal_quad, error_term
from .quadrature import _level_nodes

VALUE_FLOOR = 1e-9  # |P| at or below this is treated as a zero crossing
DECAY_SLOPE = -0.1  # ring integrals must fall at least this fast to count as decaying


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    r_squared: float
    window_max_slope: float
    n_samples: int
    window_max_intercept: float = math.nan
    window_min_slope: float = math.nan  # lower envelope, reported only


def _linear_fit(x, y):
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return float(slope), float(intercept), r2


def _windows(log_r, ratio, window):
    if window:
        return np.arange(log_r.size) // int(window)
    # geometric windows anchored at the first sample
    return np.floor((log_r - log_r[0]) / math.log(ratio) + 1e-9).astype(int)


def fit_growth_exponent(records, window=None, ratio=None):
    """Least-squares slope of log|P| against log r, plus the slope of windowed maxima.

    ``records`` are SweepRecord-like (``r`` and ``error`` attributes) or
    (r, value) pairs.  Windows are geometric in r with the given ratio
    (default 1.25) unless ``window`` fixes a number of samples per window.
    """
    ratio = DEFAULTS.window_ratio if ratio is None else float(ratio)
    if ratio <= 1.0:
        raise DomainError("window ratio must exceed 1")
    rs = []
    vals = []
    for rec in records:
        r, v = (rec.r, rec.error) if hasattr(rec, "error") else rec
        rs.append(float(r))
        vals.append(float(v))
    rs = np.asarray(rs)
    vals = np.abs(np.asarray(vals))
    if rs.size > 1 and np.any(np.diff(rs) <= 0):
        raise DomainError("r values must be strictly increasing")
    keep = vals > VALUE_FLOOR
    n = int(keep.sum())
    if n < DEFAULTS.min_fit_samples:
        raise InsufficientData(f"need at least {DEFAULTS.min_fit_samples} samples with |value| > {VALUE_FLOOR}, got {n}")
    log_r = np.log(rs[keep])
    log_v = np.log(vals[keep])
    slope, intercept, r2 = _linear_fit(log_r, log_v)

    idx = _windows(log_r, ratio, window)
    wx, wmax, wmin = [], [], []
    for w in np.unique(idx):
        sel = np.flatnonzero(idx == w)
        top = sel[np.argmax(log_v[sel])]
        wx.append(log_r[top])
        wmax.append(log_v[top])
        wmin.append(log_v[sel].min())
    if len(wx) >= 2:
        w_slope, w_int, _ = _linear_fit(np.asarray(wx), np.asarray(wmax))
        lo_slope = _linear_fit(np.asarray(wx), np.asarray(wmin))[0]
    else:
        w_slope, w_int, lo_slope = slope, intercept, slope
    return ExponentFit(slope, intercept, r2, w_slope, n, w_int, lo_slope)


def sweep(p, radii):
    """SweepRecords for each radius, in the given order."""
    p = as_pexponent(p)
    return [error_term(p, r) for r in radii]


# --------------------------------------------------------------------------
# integrability scan

_RHO_NODES, _RHO_WEIGHTS = np.polynomial.legendre.leggauss(8)
_T_LEVELS = 2  # tanh-sinh levels used in the angular variable


@dataclass(frozen=True)
class ScanRow:
    beta: float
    radius: float
    ring_integral: float
    status: str  # "ok" or a failure note


@dataclass(frozen=True)
class BetaScan:
    p: float
    rows: list
    slopes: dict  # beta -> fitted log-log slope of ring integral against R
    decaying: dict  # beta -> bool

    def table(self):
        return [(r.beta, r.radius, r.ring_integral) for r in self.rows]


def _angular_rule(p):
    """Fixed tanh-sinh nodes for int_0^1 f(t) t^(1/p-1) (1-t)^(1/p-1) dt."""
    a = 1.0 / p - 1.0
    ts, tcs, ws = [], [], []
    for level in range(_T_LEVELS + 1):
        t, tc, w = _level_nodes(a, a, level)
        ts.append(t)
        tcs.append(tc)
        ws.append(w)
    h = 0.5 / 2**_T_LEVELS
    return np.concatenate(ts), np.concatenate(tcs), h * np.concatenate(ws)


def ring_integral(p, beta, R, panel=0.5):
    """int_{R <= |y|_p <= 2R} |Dcal_beta(1:y)| dy.

    Per quadrant y = rho (t^(1/p), (1-t)^(1/p)) and dy = (1/p) rho w(t) drho dt;
    the four quadrants contribute equally.  rho uses composite Gauss-Legendre
    on panels of width ``panel``, t a fixed tanh-sinh rule.
    """
    p = as_pexponent(p)
    pp = p.p
    t, tc, wt = _angular_rule(pp)
    npan = max(1, int(math.ceil(R / panel)))
    edges = np.linspace(R, 2.0 * R, npan + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    rho = (mid[:, None] + half[:, None] * _RHO_NODES[None, :]).ravel()
    wrho = (half[:, None] * _RHO_WEIGHTS[None, :]).ravel()
    dirs = np.stack([t ** (1.0 / pp), tc ** (1.0 / pp)], axis=1)
    ys = (rho[:, None, None] * dirs[None, :, :]).reshape(-1, 2)
    vals, _ = d_cal_closed_many(p, beta, 1.0, ys)
    vals = np.abs(vals).reshape(rho.size, t.size)
    return 4.0 / pp * float(np.sum(wrho * rho * (vals @ wt)))


def _ring_integral_quad(p, beta, R):
    # fallback with the direct integral, only used when the closed form fails
    p = as_pexponent(p)
    pp = p.p
    t, tc, wt = _angular_rule(pp)
    edges = np.linspace(R, 2.0 * R, 5)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        for x, w in zip(_RHO_NODES, _RHO_WEIGHTS):
            rho = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x
            acc = 0.0
            for ti, tci, wi in zip(t, tc, wt):
                y = (rho * ti ** (1.0 / pp), rho * tci ** (1.0 / pp))
                acc += wi * abs(d_cal_quad(p, beta, 1.0, y, tol=1e-8).value)
            total += 0.5 * (hi - lo) * w * rho * acc
    return 4.0 / pp * total


def beta_scan(p, betas, radius_grid=(1.0, 2.0, 4.0, 8.0, 16.0)):
    """Ring integrals of |Dcal_beta(1:.)| over doubling annuli, one row per (beta, R).

    A beta counts as decaying when the log-log slope of ring integral against
    R is below -0.1; growth or a plateau flags it as empirically
    non-integrable.
    """
    p = as_pexponent(p)
    radius_grid = [float(R) for R in radius_grid]
    if any(R <= 0 for R in radius_grid) or any(b <= a for a, b in zip(radius_grid, radius_grid[1:])):
        raise DomainError("radius grid must be positive and increasing")
    rows = []
    slopes = {}
    decaying = {}
    for beta in betas:
        beta = float(beta)
        if not -1.0 < beta <= 6.0:
            raise DomainError(f"beta must lie in (-1, 6], got {beta}")
        ok_r, ok_v = [], []
        for R in radius_grid:
            status = "ok"
            try:
                value = ring_integral(p, beta, R)
            except NonConvergence as exc:
                try:
                    value = _ring_integral_quad(p, beta, R)
                    status = "fallback"
                except NonConvergence:
                    value = math.nan
                    status = f"failed: {exc}"
            rows.append(ScanRow(beta, R, value, status))
            if math.isfinite(value) and value > 0:
                ok_r.append(R)
                ok_v.append(value)
        if len(ok_r) >= 2:
            slope = float(np.polyfit(np.log(ok_r), np.log(ok_v), 1)[0])
        else:
            slope = math.nan
        slopes[beta] = slope
        decaying[beta] = bool(slope < DECAY_SLOPE)
    return BetaScan(p.p, rows, slopes, decaying)
