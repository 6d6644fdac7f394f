"""Generalized Bessel functions attached to the p-norm.

For p > 0 and eta in R^2 the order-zero function is

    J0p(eta) = (2/p)^2 / Gamma(1/p)^2
               * int_0^1 cos(eta1 t^(1/p)) cos(eta2 (1-t)^(1/p)) t^(1/p-1) (1-t)^(1/p-1) dt

and order omega > 0 is obtained by the fractional lift

    J_omega^p(eta) = |eta|_p^omega / (p^(omega-1) Gamma(omega))
                     * int_0^1 J0p(tau eta) tau (1 - tau^p)^(omega-1) dtau.

Both have power series grouped by k = m1 + m2,

    J_omega^p(eta) = (|eta|_p / p)^omega (2/p)^2 / Gamma(1/p)^2
                     * sum_k (-1)^k / Gamma(2(k+1)/p + omega)
                       * sum_{m1+m2=k} Gamma((2m1+1)/p) Gamma((2m2+1)/p) / ((2m1)! (2m2)!) eta1^(2m1) eta2^(2m2)

and at p = 2 they reduce to the classical J_omega(|eta|).  Every function here
has a quadrature route and a series route so the two can check each other.

Krätzel's older generalization ``kratzel_j`` (a different function) is here too
because the second main term of the p > 2 lattice problem is built from it.
"""

import math
import threading
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .config import DEFAULTS
from .errors import DomainError, NonConvergence
from .quadrature import integrate_01_singular, level_for_frequency
from .special import beta, gamma, log_gamma

_EPS = np.finfo(float).eps

# absolute tolerance of the t-integral behind jomega_normalized
NORMALIZED_TOL = 1e-13


@dataclass(frozen=True)
class PExponent:
    """A validated exponent p > 0 together with the Gamma constants it needs."""

    p: float
    gamma_inv_p: float = field(init=False)
    gamma_2_inv_p: float = field(init=False)
    area_const: float = field(init=False)

    def __post_init__(self):
        p = float(self.p)
        if not (p > 0.0 and math.isfinite(p)):
            raise DomainError(f"p must be a positive real number, got {self.p!r}")
        object.__setattr__(self, "p", p)
        g1 = gamma(1.0 / p)
        g2 = gamma(2.0 / p)
        object.__setattr__(self, "gamma_inv_p", g1)
        object.__setattr__(self, "gamma_2_inv_p", g2)
        # area of the unit p-circle
        object.__setattr__(self, "area_const", (2.0 / p) * g1 * g1 / g2)

    @property
    def is_integer(self):
        return self.p == int(self.p)

    @property
    def j0_at_origin(self):
        """J0p(0, 0) = (2/p)^2 / Gamma(2/p)."""
        return (2.0 / self.p) ** 2 / self.gamma_2_inv_p


def as_pexponent(p):
    return p if isinstance(p, PExponent) else PExponent(p)


@dataclass(frozen=True)
class PlanePoint:
    eta1: float
    eta2: float

    def __iter__(self):
        yield self.eta1
        yield self.eta2

    def p_norm(self, p):
        p = p.p if isinstance(p, PExponent) else float(p)
        m = self.max_norm()
        if m == 0.0:
            return 0.0
        # scaled to avoid overflow of |eta|^p
        a, b = abs(self.eta1) / m, abs(self.eta2) / m
        return m * (a**p + b**p) ** (1.0 / p)

    def max_norm(self):
        return max(abs(self.eta1), abs(self.eta2))

    def scaled(self, c):
        return PlanePoint(c * self.eta1, c * self.eta2)


def as_point(eta):
    if isinstance(eta, PlanePoint):
        return eta
    e1, e2 = eta
    return PlanePoint(float(e1), float(e2))


@dataclass(frozen=True)
class EvalResult:
    value: float
    error_estimate: float
    method: str  # "quadrature", "series", "closed-form", "table"


def _p_norm_array(etas, p):
    a = np.abs(etas)
    m = a.max(axis=-1)
    safe = np.where(m > 0, m, 1.0)
    return np.where(m > 0, m * ((a[..., 0] / safe) ** p + (a[..., 1] / safe) ** p) ** (1.0 / p), 0.0)


# --------------------------------------------------------------------------
# quadrature routes


def _j0p_integrand(p, eta1, eta2):
    inv = 1.0 / p

    def f(t, tc):
        return np.cos(np.multiply.outer(eta1, t**inv)) * np.cos(np.multiply.outer(eta2, tc**inv))

    return f


def _frequency(p, eta1, eta2):
    # worst local frequency of cos(eta t^(1/p)) away from the clustered endpoints
    return (np.max(np.abs(eta1)) + np.max(np.abs(eta2))) * max(1.0, 1.0 / p)


def j0p_quad(p, eta, tol=None):
    """J0p(eta) by tanh-sinh quadrature of its defining integral."""
    p = as_pexponent(p)
    eta = as_point(eta)
    tol = DEFAULTS.quad_tol if tol is None else float(tol)
    if not tol > 0:
        raise DomainError("tol must be positive")
    c = (2.0 / p.p) ** 2 / p.gamma_inv_p**2
    a = 1.0 / p.p - 1.0
    res = integrate_01_singular(
        _j0p_integrand(p.p, eta.eta1, eta.eta2),
        a,
        a,
        tol / c,
        with_complement=True,
        min_level=level_for_frequency(_frequency(p.p, eta.eta1, eta.eta2)),
    )
    return EvalResult(c * res.value, c * res.error_estimate, "quadrature")


def _check_omega(omega, strict=False):
    omega = float(omega)
    if not math.isfinite(omega) or omega < 0.0 or (strict and omega == 0.0):
        raise DomainError(f"order omega must be {'>' if strict else '>='} 0, got {omega}")
    return omega


def jomega_quad(p, omega, eta, tol=None):
    """J_omega^p(eta) by nested quadrature of the order-lifting integral.

    With u = tau^p the tau-integral becomes
    (1/p) int_0^1 J0p(u^(1/p) eta) u^(2/p-1) (1-u)^(omega-1) du,
    whose endpoint weight the tanh-sinh rule absorbs for any omega > 0.
    """
    p = as_pexponent(p)
    omega = _check_omega(omega)
    eta = as_point(eta)
    if omega == 0.0:
        return j0p_quad(p, eta, tol)
    tol = DEFAULTS.quad_tol if tol is None else float(tol)
    norm = eta.p_norm(p)
    if norm == 0.0:
        return EvalResult(0.0, 0.0, "quadrature")
    pp = p.p
    inv = 1.0 / pp
    c = (2.0 / pp) ** 2 / p.gamma_inv_p**2
    pref = math.exp(omega * math.log(norm) - (omega - 1.0) * math.log(pp) - log_gamma(omega)) / pp
    outer_tol = 0.5 * tol / pref
    inner_tol = 0.5 * tol / (pref * c * beta(2.0 / pp, omega))
    freq = _frequency(pp, eta.eta1, eta.eta2)
    inner_level = level_for_frequency(freq)
    inner_err = [0.0]

    def outer(u):
        r = u**inv
        inner = integrate_01_singular(
            _j0p_integrand(pp, eta.eta1 * r, eta.eta2 * r),
            inv - 1.0,
            inv - 1.0,
            inner_tol,
            with_complement=True,
            min_level=inner_level,
        )
        inner_err[0] = max(inner_err[0], float(np.max(inner.error_estimate)))
        return c * inner.value

    res = integrate_01_singular(outer, 2.0 * inv - 1.0, omega - 1.0, outer_tol, min_level=inner_level)
    err = pref * (res.error_estimate + c * inner_err[0] * beta(2.0 / pp, omega))
    return EvalResult(pref * res.value, err, "quadrature")


# --------------------------------------------------------------------------
# series routes


@lru_cache(maxsize=64)
def _series_tables(p, max_k):
    m = np.arange(max_k + 1, dtype=float)
    lg_odd = log_gamma((2.0 * m + 1.0) / p)
    lg_fact = log_gamma(2.0 * m + 1.0)  # log (2m)!
    for arr in (lg_odd, lg_fact):
        arr.setflags(write=False)
    return lg_odd, lg_fact


def _series_sum(p, omega, eta1, eta2, max_k, tol):
    """Sum of the k-blocks, prefactor (2/p)^2 p^-omega / Gamma(1/p)^2 included.

    Returns (value, error_estimate).  Terms are formed in log space, each
    block is accumulated exactly with fsum, and the error estimate adds the
    propagated rounding of every log-gamma to the truncation remainder.
    """
    lg_odd, lg_fact = _series_tables(p, max_k)
    log_pref = 2.0 * math.log(2.0 / p) - omega * math.log(p) - 2.0 * log_gamma(1.0 / p)
    # zero coordinates are handled by dropping their m > 0 terms below
    l1 = 2.0 * math.log(abs(eta1)) if eta1 != 0.0 else 0.0
    l2 = 2.0 * math.log(abs(eta2)) if eta2 != 0.0 else 0.0
    ks = np.arange(max_k + 1, dtype=float)
    lg_den = log_gamma(2.0 * (ks + 1.0) / p + omega)

    blocks = []
    abs_total = 0.0
    round_err = 0.0
    scale = None
    quiet = 0
    for k in range(max_k + 1):
        m1 = np.arange(k + 1)
        # a zero coordinate only contributes through its m = 0 term
        if eta1 == 0.0:
            m1 = m1[m1 == 0]
        if eta2 == 0.0:
            m1 = m1[m1 == k]
        m2 = k - m1
        if m1.size == 0:
            blocks.append(0.0)
            quiet += 1
            if quiet >= 3 and k > 0:
                return math.fsum(blocks), float(round_err + _EPS * abs_total)
            continue
        pw1 = m1 * l1
        pw2 = m2 * l2
        parts = (lg_odd[m1], lg_odd[m2], -lg_fact[m1], -lg_fact[m2], pw1, pw2)
        logs = sum(parts) - lg_den[k] + log_pref
        terms = np.exp(logs)
        block = math.fsum(terms)
        rel = 4.0 * _EPS * (sum(np.abs(x) for x in parts) + abs(lg_den[k]) + abs(log_pref) + 1.0)
        round_err += float(np.sum(terms * rel))
        abs_total += block
        signed = -block if k % 2 else block
        blocks.append(signed)
        if scale is None:
            scale = block
        running = abs(math.fsum(blocks))
        scale = max(scale, running)
        if block <= tol * scale:
            quiet += 1
            if quiet >= 3:
                value = math.fsum(blocks)
                return value, float(round_err + _EPS * abs_total + block)
        else:
            quiet = 0
    raise NonConvergence(
        f"series did not settle within max_k={max_k} blocks for eta=({eta1}, {eta2}), p={p}",
        EvalResult(math.fsum(blocks), abs(blocks[-1]) + round_err, "series"),
    )


def _check_envelope(eta):
    if eta.max_norm() > DEFAULTS.series_envelope:
        raise DomainError(
            f"series path supports |eta|_inf <= {DEFAULTS.series_envelope}; "
            f"got {eta.max_norm():g}, use the quadrature path"
        )


def jomega_series(p, omega, eta, max_k=None, tol=None):
    """J_omega^p(eta) from its k-block power series."""
    p = as_pexponent(p)
    omega = _check_omega(omega)
    eta = as_point(eta)
    max_k = DEFAULTS.series_max_k if max_k is None else int(max_k)
    if max_k < 1:
        raise DomainError("max_k must be at least 1")
    tol = DEFAULTS.series_tol if tol is None else float(tol)
    _check_envelope(eta)
    norm = eta.p_norm(p)
    if omega > 0.0 and norm == 0.0:
        return EvalResult(0.0, 0.0, "series")
    value, err = _series_sum(p.p, omega, eta.eta1, eta.eta2, max_k, tol)
    if omega > 0.0:
        scale = norm**omega
        value *= scale
        err *= scale
    return EvalResult(value, err, "series")


def j0p_series(p, eta, max_k=None, tol=None):
    """J0p(eta) from its k-block power series."""
    return jomega_series(p, 0.0, eta, max_k, tol)


# --------------------------------------------------------------------------
# batch route for J_omega^p(eta) / |eta|_p^omega at many points

_CHEB_N = 17  # Chebyshev points per panel
_PANEL = 2.0  # panel width in lambda
_CHEB_NODES = np.cos(np.pi * (np.arange(_CHEB_N) + 0.5) / _CHEB_N)
_CHEB_MATRIX = (2.0 / _CHEB_N) * np.cos(
    np.pi * np.outer(np.arange(_CHEB_N), np.arange(_CHEB_N) + 0.5) / _CHEB_N
)
_CHEB_MATRIX[0] *= 0.5


class KernelTable:
    """Piecewise Chebyshev table of K(lam) = int_0^1 cos(lam tau) tau (1 - tau^p)^(omega-1) dtau.

    Swapping the two integrals of the order lift gives

        J_omega^p(eta) / |eta|_p^omega = c / (p^(omega-1) Gamma(omega))
            * int_0^1 w(t) (K(a + b) + K(a - b)) / 2 dt,

    a = eta1 t^(1/p), b = eta2 (1-t)^(1/p), so one table per (p, omega)
    serves any number of points.  Panels of width 2 with 17 Chebyshev points
    interpolate K to about 1e-16; the table grows on demand.
    """

    def __init__(self, p, omega):
        self.p = float(p)
        self.omega = float(omega)
        self.coeffs = np.zeros((_CHEB_N, 0))
        self.max_quad_error = 0.0
        self._lock = threading.Lock()

    @property
    def lam_max(self):
        return self.coeffs.shape[1] * _PANEL

    def _kernel(self, lam):
        inv = 1.0 / self.p
        out = np.empty(lam.size)
        for start in range(0, lam.size, 256):
            chunk = lam[start : start + 256]
            res = integrate_01_singular(
                lambda u: np.cos(np.multiply.outer(chunk, u**inv)),
                2.0 * inv - 1.0,
                self.omega - 1.0,
                1e-15,
                min_level=level_for_frequency(chunk.max() * max(1.0, inv)),
            )
            out[start : start + 256] = res.value * inv
            self.max_quad_error = max(self.max_quad_error, float(np.max(res.error_estimate)) * inv)
        return out

    def ensure(self, lam_max):
        with self._lock:
            have = self.coeffs.shape[1]
            need = int(math.ceil(lam_max / _PANEL)) + 1
            if need <= have:
                return
            need = max(need, 2 * have, 8)
            left = np.arange(have, need) * _PANEL
            lam = (left[:, None] + 0.5 * _PANEL * (1.0 + _CHEB_NODES[None, :])).ravel()
            vals = self._kernel(lam).reshape(need - have, _CHEB_N)
            new = _CHEB_MATRIX @ vals.T
            self.coeffs = np.concatenate([self.coeffs, new], axis=1)

    def __call__(self, lam):
        lam = np.abs(lam)
        idx = np.minimum((lam / _PANEL).astype(np.intp), self.coeffs.shape[1] - 1)
        x = (lam - (idx + 0.5) * _PANEL) * (2.0 / _PANEL)
        x2 = 2.0 * x
        b1 = np.zeros_like(x)
        b2 = np.zeros_like(x)
        for k in range(_CHEB_N - 1, 0, -1):
            b1, b2 = self.coeffs[k][idx] + x2 * b1 - b2, b1
        return self.coeffs[0][idx] + x * b1 - b2


_TABLES = {}
_TABLES_LOCK = threading.Lock()


def kernel_table(p, omega):
    key = (float(p), float(omega))
    with _TABLES_LOCK:
        table = _TABLES.get(key)
        if table is None:
            table = _TABLES[key] = KernelTable(*key)
    return table


def normalized_limit(p, omega):
    """lim_{eta -> 0} J_omega^p(eta) / |eta|_p^omega = (2/p)^2 p^-omega / Gamma(2/p + omega)."""
    p = as_pexponent(p)
    return (2.0 / p.p) ** 2 * p.p ** (-omega) / gamma(2.0 / p.p + omega)


def jomega_normalized_many(p, omega, etas, tol=NORMALIZED_TOL, chunk=128):
    """Vectorised J_omega^p(eta) / |eta|_p^omega for an (N, 2) array of points.

    Points with |eta|_1 <= the series switch use the power series; the rest
    use the kernel table.  Returns (values, error_estimates).
    """
    p = as_pexponent(p)
    omega = _check_omega(omega, strict=True)
    etas = np.atleast_2d(np.asarray(etas, dtype=float))
    n = etas.shape[0]
    values = np.empty(n)
    errors = np.empty(n)
    l1 = np.abs(etas).sum(axis=1)
    small = l1 <= DEFAULTS.series_switch
    for i in np.flatnonzero(small):
        if l1[i] == 0.0:
            values[i] = normalized_limit(p, omega)
            errors[i] = 0.0
        else:
            values[i], errors[i] = _series_sum(
                p.p, omega, etas[i, 0], etas[i, 1], DEFAULTS.series_max_k, DEFAULTS.series_tol
            )
    rest = np.flatnonzero(~small)
    if rest.size:
        rest = rest[np.argsort(l1[rest], kind="stable")]
        pp = p.p
        inv = 1.0 / pp
        c = (2.0 / pp) ** 2 / p.gamma_inv_p**2
        const = c * math.exp(-(omega - 1.0) * math.log(pp) - log_gamma(omega))
        table = kernel_table(pp, omega)
        table.ensure(l1[rest].max())
        for start in range(0, rest.size, chunk):
            sel = rest[start : start + chunk]
            e1 = etas[sel, 0]
            e2 = etas[sel, 1]

            def f(t, tc, e1=e1, e2=e2):
                a = np.multiply.outer(e1, t**inv)
                b = np.multiply.outer(e2, tc**inv)
                return 0.5 * (table(a + b) + table(a - b))

            res = integrate_01_singular(
                f,
                inv - 1.0,
                inv - 1.0,
                tol / const,
                with_complement=True,
                min_level=level_for_frequency(_frequency(pp, e1, e2)),
            )
            values[sel] = const * np.asarray(res.value)
            errors[sel] = const * (np.asarray(res.error_estimate) + table.max_quad_error * beta(inv, inv))
    return values, errors


def jomega_normalized(p, omega, eta):
    """J_omega^p(eta) / |eta|_p^omega, continuous through eta = 0."""
    eta = as_point(eta)
    vals, errs = jomega_normalized_many(p, omega, [[eta.eta1, eta.eta2]])
    small = abs(eta.eta1) + abs(eta.eta2) <= DEFAULTS.series_switch
    return EvalResult(float(vals[0]), float(errs[0]), "series" if small else "table")


# --------------------------------------------------------------------------
# Krätzel's generalized Bessel function


def kratzel_j(p, nu, r, tol=None):
    """Krätzel's J_nu^(p)(r) for p >= 1, nu > 1/p - 1, r > 0.

    J_nu^(p)(r) = 2 / (sqrt(pi) Gamma(nu + 1 - 1/p)) (r/2)^(p nu / 2)
                  * int_0^1 (1 - t^p)^(nu - 1/p) cos(r t) dt
    """
    p = float(p.p if isinstance(p, PExponent) else p)
    nu, r = float(nu), float(r)
    if not p >= 1.0:
        raise DomainError(f"kratzel_j is defined for p >= 1, got p={p}")
    if not nu > 1.0 / p - 1.0:
        raise DomainError(f"kratzel_j needs nu > 1/p - 1, got nu={nu}, p={p}")
    if not r > 0.0:
        raise DomainError(f"kratzel_j needs r > 0, got {r}")
    tol = DEFAULTS.quad_tol if tol is None else float(tol)
    c = nu - 1.0 / p
    pref = 2.0 / (math.sqrt(math.pi) * gamma(nu + 1.0 - 1.0 / p)) * (0.5 * r) ** (0.5 * p * nu)

    def f(t, tc):
        # (1 - t^p) = (1 - t) g(t); g -> p as t -> 1
        with np.errstate(divide="ignore"):
            log_t = np.where(t < 0.5, np.log(np.maximum(t, 1e-320)), np.log1p(-tc))
        safe = np.where(tc > 0.0, tc, 1.0)
        g = np.where(tc > 0.0, -np.expm1(p * log_t) / safe, p)
        return np.cos(r * t) * g**c

    res = integrate_01_singular(
        f, 0.0, c, tol / pref, with_complement=True, min_level=level_for_frequency(r)
    )
    return EvalResult(pref * res.value, pref * res.error_estimate, "quadrature")
