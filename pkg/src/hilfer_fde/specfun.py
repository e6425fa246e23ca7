"""Gamma functions and the multivariate Mittag-Leffler series.

The multivariate function is

    E_{(a_1..a_n), b}(z_1..z_n) = sum_k sum_{l_1+..+l_n=k} k!/(l_1!..l_n!)
                                  * prod z_j^{l_j} / Gamma(b + sum a_j l_j)

and is evaluated layer by layer (one layer per total degree k) until a
rigorous bound on the remaining tail drops below the requested tolerance.
"""
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from scipy.special import gammaln

from . import config
from .exceptions import DomainError, TruncationError

# log(|z|) stand-in for z == 0; finite so that 0 * LOG_ZERO == 0
_LOG_ZERO = -1e300
_EPS = np.finfo(float).eps
_CANCELLATION = 16.0


def gamma_fn(x):
    """Gamma function for positive real arguments."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"gamma_fn requires x > 0, got {x}")
    if x > 171.6:
        return math.inf
    return math.gamma(x)


def recip_gamma(x):
    """1/Gamma(x) on the whole real line, exactly 0 at the poles."""
    x = float(x)
    if x <= 0 and x == math.floor(x):
        return 0.0
    if x >= 0.5:
        if x > 171.0:
            return math.exp(-math.lgamma(x))
        return 1.0 / math.gamma(x)
    # reflection: 1/Gamma(x) = Gamma(1-x) sin(pi x) / pi
    # sin(pi x) = (-1)^n sin(pi (x - n)); x - n is exact, keeping digits near the poles
    n = round(x)
    s = math.sin(math.pi * (x - n)) * (-1.0 if n % 2 else 1.0)
    if 1.0 - x > 171.0:
        return math.copysign(math.exp(math.lgamma(1.0 - x) + math.log(abs(s)) - math.log(math.pi)), s)
    return math.gamma(1.0 - x) * s / math.pi


@dataclass(frozen=True)
class MlSpec:
    weights: tuple
    b: float

    def __post_init__(self):
        weights = tuple(float(a) for a in self.weights)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "b", float(self.b))
        if not weights:
            raise DomainError("MlSpec needs at least one weight")
        if len(weights) > config.MAX_ML_DIMENSION:
            raise DomainError(f"at most {config.MAX_ML_DIMENSION} arguments are supported")
        if min(weights) <= 0:
            raise DomainError("Mittag-Leffler weights must be positive")
        if self.b <= 0:
            raise DomainError("Mittag-Leffler parameter b must be positive")

    @property
    def n(self):
        return len(self.weights)


@dataclass(frozen=True)
class MlValue:
    value: float
    terms_used: int
    truncation_bound: float


@lru_cache(maxsize=4096)
def compositions(k, n):
    """All weak compositions of k into n parts, in colexicographic order.

    Returns ``(parts, log_multinomial)`` where ``parts`` has shape (C, n).
    """
    if n == 1:
        parts = np.array([[k]], dtype=np.int64)
    else:
        rows = []
        # colex: the last part varies slowest
        for last in range(k + 1):
            head, _ = compositions(k - last, n - 1)
            tail = np.full((head.shape[0], 1), last, dtype=np.int64)
            rows.append(np.hstack([head, tail]))
        parts = np.vstack(rows)
    log_mult = gammaln(k + 1.0) - gammaln(parts + 1.0).sum(axis=1)
    parts.setflags(write=False)
    log_mult.setflags(write=False)
    return parts, log_mult


def tail_bound(radius, b, min_weight, k):
    """Bound on sum_{j>k} radius^j / Gamma(b + j*min_weight).

    Each layer j of the multivariate series is bounded by
    (sum |z|)^j / Gamma(b + j min a) once b + j min a >= 2 (Gamma is
    increasing there).  The term ratio is decreasing in j, so the tail is
    dominated by a geometric series.  Returns inf when no bound applies yet.
    """
    if radius == 0:
        return 0.0
    j = k + 1
    if b + j * min_weight < 2.0:
        return math.inf
    log_r = math.log(radius)
    log_first = j * log_r - math.lgamma(b + j * min_weight)
    ratio = math.exp(log_r + math.lgamma(b + j * min_weight) - math.lgamma(b + (j + 1) * min_weight))
    if ratio >= 1.0:
        return math.inf
    if log_first < -745:
        return 0.0
    return math.exp(log_first) / (1.0 - ratio)


def layers_needed(radius, b, min_weight, tol, max_layers=None):
    """Smallest K whose tail bound is <= tol."""
    max_layers = config.MAX_LAYERS if max_layers is None else max_layers
    best = math.inf
    for k in range(max_layers + 1):
        bound = tail_bound(radius, b, min_weight, k)
        best = min(best, bound)
        if bound <= tol:
            return k, bound
    raise TruncationError(f"series not certified to {tol:g} within {max_layers} layers", best)


def _check_arguments(z):
    if np.any(~np.isfinite(z)):
        raise DomainError("Mittag-Leffler arguments must be finite")
    if z.size and np.max(np.abs(z)) > config.MAX_ML_ARGUMENT:
        raise DomainError(f"|z| exceeds {config.MAX_ML_ARGUMENT:g}; series evaluation is unreliable there")


def ml_series(weights, b, z, tol=config.DEFAULT_TOL, max_layers=None):
    """Vectorized series evaluation.

    ``z`` has shape (n, P): one row per argument, one column per point.
    Returns ``(values, terms_used, truncation_bound)``.

    Terms are summed in double precision with Neumaier compensation.  Points
    where the terms cancel heavily and the estimated rounding error exceeds
    ``tol / 4`` are re-summed with mpmath at a working precision chosen from
    the error estimate.  Without cancellation the result carries a relative
    error of order 1e-13 on top of the truncation bound.
    """
    spec = MlSpec(weights, b)
    z = np.atleast_2d(np.asarray(z, dtype=float))
    if z.shape[0] != spec.n:
        raise DomainError(f"expected {spec.n} arguments, got {z.shape[0]}")
    _check_arguments(z)
    a = np.asarray(spec.weights)
    radius = float(np.max(np.sum(np.abs(z), axis=0))) if z.size else 0.0
    top, bound = layers_needed(radius, spec.b, float(a.min()), tol, max_layers)
    n_terms = math.comb(top + spec.n, spec.n)
    if n_terms > config.MAX_TERMS:
        raise TruncationError(f"certifying tol={tol:g} needs {n_terms} terms", bound)

    with np.errstate(divide="ignore"):
        log_abs = np.where(z == 0, _LOG_ZERO, np.log(np.abs(z)))
    negative = (z < 0).astype(np.int64)

    # layer 0 is exactly 1/Gamma(b)
    total = np.full(z.shape[1], recip_gamma(spec.b))
    comp = np.zeros(z.shape[1])
    error = np.abs(total) * _EPS
    magnitude = np.abs(total)
    for k in range(1, top + 1):
        parts, log_mult = compositions(k, spec.n)
        log_gamma = gammaln(spec.b + parts @ a)
        log_powers = parts @ log_abs
        log_terms = log_mult[:, None] - log_gamma[:, None] + log_powers
        signs = 1.0 - 2.0 * ((parts @ negative) % 2)
        values = signs * np.exp(log_terms)
        # exp(log) inherits the absolute error of the log as relative error
        scale = 1.0 + np.abs(log_mult)[:, None] + np.abs(log_gamma)[:, None] + np.abs(np.maximum(log_powers, -745.0))
        error += 4.0 * _EPS * np.sum(np.abs(values) * scale, axis=0)
        magnitude += np.sum(np.abs(values), axis=0)
        for row in values:
            t = total + row
            comp += np.where(np.abs(total) >= np.abs(row), (total - t) + row, (row - t) + total)
            total = t
    result = total + comp
    # only cancellation is worth extra precision; same-sign sums are already
    # accurate relative to their own magnitude
    cancelling = magnitude > _CANCELLATION * np.abs(result)
    for j in np.flatnonzero((error > tol / 4) & cancelling):
        result[j] = _ml_point_mp(spec, z[:, j], top, tol, error[j])
    return result, n_terms, bound


def _ml_point_mp(spec, z, top, tol, error):
    import mpmath

    digits = 20 + int(math.ceil(math.log10(max(error, tol) / tol))) + int(math.log10(top + 2))
    with mpmath.workdps(digits):
        zs = [mpmath.mpf(float(v)) for v in z]
        a = [mpmath.mpf(w) for w in spec.weights]
        b = mpmath.mpf(spec.b)
        acc = mpmath.mpf(0)
        for k in range(top + 1):
            parts, _ = compositions(k, spec.n)
            kfact = mpmath.factorial(k)
            for row in parts:
                mult = kfact
                arg = b
                prod = mpmath.mpf(1)
                for lj, zj, aj in zip(row, zs, a):
                    lj = int(lj)
                    mult /= mpmath.factorial(lj)
                    arg += aj * lj
                    prod *= zj ** lj
                acc += mult * prod * mpmath.rgamma(arg)
        return float(acc)


def ml_eval(spec, z, tol=config.DEFAULT_TOL, max_layers=None):
    """Evaluate the multivariate Mittag-Leffler function at one point."""
    if not isinstance(spec, MlSpec):
        spec = MlSpec(*spec)
    if tol <= 0:
        raise DomainError("tol must be positive")
    z = np.asarray(z, dtype=float).reshape(-1, 1)
    values, terms, bound = ml_series(spec.weights, spec.b, z, tol, max_layers)
    return MlValue(float(values[0]), terms, bound)


def ml_scalar(a, b, z, tol=config.DEFAULT_TOL):
    """Two-parameter Mittag-Leffler function E_{a,b}(z)."""
    return ml_eval(MlSpec((a,), b), [z], tol).value
