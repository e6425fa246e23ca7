"""Brute-force reference solutions via the equivalent Volterra integral equation.

Applying I^{alpha_0} to the equation gives

    y = y_{a0,b0} - sum_i a_i I^{nu_i} y_{ai,bi} + I^{alpha_0} g + sum_i a_i I^{nu_i} y,

with nu_i = alpha_0 - alpha_i.  The power-law part of the right-hand side is
pushed through a few Picard sweeps symbolically until what is left is at
least linear at the origin; the remainder is marched with product-trapezoid
weights, one scalar linear solve per step.
"""

import math

import numpy as np

from . import config
from .exceptions import GridError, ProblemError, StepSizeError
from .forcing import Power
from .fracops import GridSpec, SampledFunction, rl_integral, trapezoid_weights
from .problem import existence_report, validate
from .solver import initial_function
from .specfun import gamma_fn, recip_gamma

MAX_SWEEPS = 200
# sweeps stop once they outgrow the data by this factor (tiny nu_i: no symbolic contraction)
SWEEP_GROWTH = 10.0


def _add(terms, exponent, coeff):
    key = round(exponent, 12)
    terms[key] = terms.get(key, 0.0) + coeff


def _gamma_ratio(e, nu):
    # Gamma(e+1)/Gamma(e+nu+1); log form once Gamma(e+1) would overflow
    if e + nu < 150:
        return gamma_fn(e + 1) * recip_gamma(e + nu + 1)
    return math.exp(math.lgamma(e + 1) - math.lgamma(e + nu + 1))


def _integrate(terms, nu):
    # I^nu x^e = Gamma(e+1)/Gamma(e+nu+1) x^{e+nu}
    out = {}
    for e, c in terms.items():
        _add(out, e + nu, c * _gamma_ratio(e, nu))
    return out


def _apply_kernel(terms, nus, coeffs):
    out = {}
    for nu, a in zip(nus, coeffs):
        for e, c in _integrate(terms, nu).items():
            _add(out, e, a * c)
    return {e: c for e, c in out.items() if c != 0}


def _size(terms, end):
    return sum(abs(c) * end ** e for e, c in terms.items())


def _evaluate(terms, x):
    y = np.zeros_like(x)
    pos = x > 0
    for e, c in terms.items():
        y[pos] += c * x[pos] ** e
        if e == 0:
            y[~pos] += c
    return y


def _origin_value(terms):
    if not terms:
        return 0.0
    low = min(terms)
    if low < 0:
        return math.copysign(math.inf, terms[low])
    return terms.get(0.0, 0.0)


def volterra_solve(problem, grid=None):
    """Sample the solution on ``grid`` by product-trapezoid time stepping."""
    grid = GridSpec(problem.interval_end, config.default_grid()) if grid is None else grid
    idx = validate(problem)
    report = existence_report(problem, idx)
    if not report.solvable:
        raise ProblemError(f"no solution exists: initial values {report.offending} must vanish")
    p = idx.normalized
    nus = [p.leading.order - t.order for t in p.lower]
    coeffs = [t.coefficient for t in p.lower]

    known = {}
    for pt in initial_function(p, 0, idx):
        _add(known, pt.exponent, pt.coeff)
    for i, (nu, a) in enumerate(zip(nus, coeffs), start=1):
        lower = {}
        for pt in initial_function(p, i, idx):
            _add(lower, pt.exponent, pt.coeff)
        for e, c in _integrate(lower, nu).items():
            _add(known, e, -a * c)
    g = p.forcing
    numeric = None
    if isinstance(g, Power):
        _add(known, g.exponent + p.leading.order,
             g.scale * gamma_fn(g.exponent + 1) * recip_gamma(g.exponent + p.leading.order + 1))
    elif not g.is_zero:
        numeric = rl_integral(g, p.leading.order, grid).values
    known = {e: c for e, c in known.items() if c != 0}

    # symbolic Picard sweeps: y = S + v with S = sum_{r<=R} K^r P0
    explicit = dict(known)
    sweep = known
    if nus:
        limit = SWEEP_GROWTH * _size(known, grid.interval_end)
        remainder = _apply_kernel(sweep, nus, coeffs) if sweep else {}
        for _ in range(MAX_SWEEPS):
            if not sweep or min(sweep) >= 1 or not _size(remainder, grid.interval_end) <= limit:
                break
            sweep = remainder
            for e, c in sweep.items():
                _add(explicit, e, c)
            remainder = _apply_kernel(sweep, nus, coeffs)
        # v = (numeric part) + K^{R+1} P0 + K v
    else:
        remainder = {}

    x = grid.x
    h = grid.step
    source = _evaluate(remainder, x)
    if numeric is not None:
        source = source + numeric
    v = _march(source, h, nus, coeffs)

    y = _evaluate(explicit, x) + v
    y[0] = _origin_value(explicit) + v[0]
    return SampledFunction(h, y)


def _march(source, h, nus, coeffs):
    """Solve v = source + sum_i a_i I^{nu_i} v on the grid."""
    if not nus:
        return np.array(source, dtype=float)
    n_pts = source.size
    v = np.zeros(n_pts)
    v[0] = source[0]
    weights = []
    pivot = 1.0
    for nu, a in zip(nus, coeffs):
        c, e = trapezoid_weights(nu, n_pts)
        scale = a * h ** nu * recip_gamma(nu + 2)
        weights.append((scale, c, e))
        pivot -= scale * c[0]
    if abs(pivot) < 1e-14:
        raise StepSizeError(f"singular step equation (pivot {pivot:.3e}); refine the grid")
    for j in range(1, n_pts):
        acc = source[j]
        for scale, c, e in weights:
            # history k = 0..j-1 uses c_{j-k}; origin correction on v_0
            hist = np.dot(c[j:0:-1], v[:j]) + (e[j] - c[j]) * v[0]
            acc += scale * hist
        v[j] = acc / pivot
    return v


def compare(a, b, skip=0):
    """Error metrics of ``a`` against reference ``b`` after dropping ``skip`` leading samples."""
    if skip < 0:
        raise GridError("skip must be non-negative")
    if a.points != b.points or not math.isclose(a.step, b.step, rel_tol=1e-12) or a.start != b.start:
        raise GridError("samples live on different grids")
    if skip >= len(a):
        raise GridError("skip removes every sample")
    va = np.asarray(a.values[skip:])
    vb = np.asarray(b.values[skip:])
    diff = np.abs(va - vb)
    rel = diff / np.maximum(np.abs(vb), 1e-12)
    return {
        "max_abs": float(diff.max()),
        "max_rel": float(rel.max()),
        "l2": float(math.sqrt(a.step * np.sum(diff ** 2))),
    }
