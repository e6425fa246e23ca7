"""Closed-form solutions built from multivariate Mittag-Leffler functions.

With w_i = alpha_0 - alpha_i and z_i(x) = a_i x^{w_i}, the solution is

    y = y_g + sum_k y_{k-gamma} [ x^{k-gamma}/Gamma(k-gamma+1)
                                  + sum_{i > l_k} a_i x^{k-gamma+w_i} E_{w, k+1-gamma+w_i}(z) ]
    y_g(x) = int_0^x t^{alpha_0-1} E_{w, alpha_0}(z(t)) g(x-t) dt

where k runs over 0..m_0-1 (all gamma equal) or M..m_0-1 (split case).
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.special import gammaln

from . import config
from .exceptions import DomainError, ProblemError
from .forcing import Power, Zero
from .fracops import GridSpec, SampledFunction, hilfer_derivative_numeric, trapezoid_weights
from .problem import (AllGammaEqual, FdeProblem, FractionalTerm, existence_report,
                      validate)
from .specfun import compositions, layers_needed, ml_series, recip_gamma


@dataclass(frozen=True, order=True)
class PowerTerm:
    """coeff * x**exponent"""

    exponent: float
    coeff: float

    def to_dict(self):
        return {"coeff": self.coeff, "exponent": self.exponent}


@dataclass(frozen=True, order=True)
class MlTerm:
    """coeff * x**exponent * E_{weights, b}(a_1 x^{w_1}, ..., a_n x^{w_n})"""

    exponent: float
    b: float
    coeff: float

    def to_dict(self):
        return {"coeff": self.coeff, "exponent": self.exponent, "b": self.b}


@dataclass(frozen=True)
class Convolution:
    """int_0^x t^(p-1) E_{weights, b}(z(t)) g(x - t) dt"""

    p: float
    b: float
    forcing: object

    def to_dict(self):
        return {"p": self.p, "b": self.b, "forcing": self.forcing.to_dict()}


@dataclass(frozen=True)
class ClosedFormSolution:
    ml_weights: tuple
    ml_args_scale: tuple
    power_terms: tuple = ()
    ml_terms: tuple = ()
    convolution: Convolution = None

    def __post_init__(self):
        if any(w <= 0 for w in self.ml_weights):
            raise ProblemError("Mittag-Leffler weights must be positive")
        if any(t.b <= 0 for t in self.ml_terms):
            raise ProblemError("Mittag-Leffler parameters b must be positive")
        if any(t.exponent <= -1 for t in self.power_terms + self.ml_terms):
            raise ProblemError("solution exponents must exceed -1")

    @property
    def is_zero(self):
        return not self.power_terms and not self.ml_terms and self.convolution is None

    def origin_behaviour(self):
        """Lowest exponent present and the sign of its leading coefficient."""
        lead = []
        for t in self.power_terms:
            lead.append((t.exponent, t.coeff))
        for t in self.ml_terms:
            lead.append((t.exponent, t.coeff * recip_gamma(t.b)))
        conv = self.convolution
        if conv is not None and isinstance(conv.forcing, Power):
            f = conv.forcing
            lead.append((conv.p + f.exponent, f.scale))
        lead = [(e, c) for e, c in lead if c != 0]
        if not lead:
            return math.inf, 0.0
        low = min(e for e, _ in lead)
        return low, sum(c for e, c in lead if e == low)

    @property
    def unbounded_at_origin(self):
        return self.origin_behaviour()[0] < 0

    def term_list(self):
        return {
            "ml_weights": list(self.ml_weights),
            "ml_args_scale": list(self.ml_args_scale),
            "power_terms": [t.to_dict() for t in self.power_terms],
            "ml_terms": [t.to_dict() for t in self.ml_terms],
            "convolution": None if self.convolution is None else self.convolution.to_dict(),
        }


def _merge(terms, key, make):
    acc = {}
    for t in terms:
        k = key(t)
        acc[k] = acc.get(k, 0.0) + t.coeff
    return tuple(sorted(make(k, c) for k, c in acc.items() if c != 0))


def initial_function(problem, i, idx=None):
    """Power terms of y_{alpha_i,beta_i}: sum_k y_{k-gamma_i} x^{k-gamma_i} / Gamma(k-gamma_i+1)."""
    idx = validate(problem) if idx is None else idx
    gamma = idx.gamma[i]
    terms = []
    for k in range(idx.m[i]):
        value = idx.initial_value(i, k)
        if value != 0:
            terms.append(PowerTerm(k - gamma, value * recip_gamma(k - gamma + 1)))
    return terms


def _skeleton(idx):
    p = idx.normalized
    a0 = p.leading.order
    weights = tuple(a0 - t.order for t in p.lower)
    scales = tuple(t.coefficient for t in p.lower)
    conv = None if p.forcing.is_zero else Convolution(a0, a0, p.forcing)
    return weights, scales, conv


def solve_homogeneous_ic(problem):
    idx = validate(problem)
    if idx.has_initial_data():
        raise ProblemError("solve_homogeneous_ic requires all initial values to be zero")
    weights, scales, conv = _skeleton(idx)
    return ClosedFormSolution(weights, scales, (), (), conv)


def solve(problem):
    """Existence verdict and, when solvable, the closed-form solution."""
    idx = validate(problem)
    report = existence_report(problem, idx)
    if not report.solvable:
        return report, None
    p = idx.normalized
    a0 = p.leading.order
    gamma = idx.gamma[0]
    weights, scales, conv = _skeleton(idx)
    first = 0 if isinstance(idx.case, AllGammaEqual) else max(idx.case.M, 0)
    powers, mls = [], []
    for k in range(first, idx.m[0]):
        value = idx.initial_value(0, k)
        if value == 0:
            continue
        powers.append(PowerTerm(k - gamma, value * recip_gamma(k - gamma + 1)))
        for i in range(idx.lk_table[k] + 1, len(idx.m)):
            w = a0 - p.terms[i].order
            mls.append(MlTerm(k - gamma + w, k + 1 - gamma + w, value * p.terms[i].coefficient))
    powers = _merge(powers, lambda t: t.exponent, lambda e, c: PowerTerm(e, c))
    mls = _merge(mls, lambda t: (t.exponent, t.b), lambda k, c: MlTerm(k[0], k[1], c))
    return report, ClosedFormSolution(weights, scales, powers, mls, conv)


def _ml_values(sol, b, x, tol):
    if not sol.ml_weights:
        return np.full(x.size, recip_gamma(b))
    z = np.array([a * x ** w for a, w in zip(sol.ml_args_scale, sol.ml_weights)])
    values, _, _ = ml_series(sol.ml_weights, b, z, tol)
    return values


def _convolution_values(sol, grid, tol):
    conv = sol.convolution
    x = grid.x
    g = conv.forcing
    if isinstance(g, Power):
        # the kernel series convolved with x^p term by term
        with np.errstate(divide="ignore"):
            xp = np.where(x > 0, x ** (conv.p + g.exponent), 0.0)
        coef = g.scale * math.gamma(g.exponent + 1)
        return coef * xp * _ml_values(sol, conv.b + g.exponent + 1, x, tol / max(abs(coef), 1e-300))
    return _kernel_series_convolution(sol, grid, tol)


def _kernel_series_convolution(sol, grid, tol):
    """Expand the kernel into powers t^(beta-1)/Gamma(beta) and integrate each exactly.

    y_g = sum over compositions l of mult(l) prod a^l I^{p + w.l} g, with g
    linear per panel.  The tail is bounded by |g|_inf X^p times the series
    tail at b = p + 1, z_j = |a_j| X^{w_j}.
    """
    conv = sol.convolution
    h = grid.step
    x = grid.x
    g = np.asarray(conv.forcing(x), dtype=float)
    size = x.size
    a = np.asarray(sol.ml_args_scale, dtype=float)
    w = np.asarray(sol.ml_weights, dtype=float)
    n = a.size
    gmax = float(np.max(np.abs(g))) or 1.0
    X = grid.interval_end
    if n:
        radius = float(np.sum(np.abs(a) * X ** w))
        budget = tol / (gmax * max(X ** conv.p, 1e-300))
        top, _ = layers_needed(radius, conv.p + 1, float(w.min()), budget)
    else:
        top = 0
    toeplitz = np.zeros(size)
    origin = np.zeros(size)
    with np.errstate(divide="ignore"):
        log_abs = np.where(a == 0, -1e300, np.log(np.abs(a)))
    negative = (a < 0).astype(np.int64)
    for k in range(top + 1):
        parts, log_mult = compositions(k, max(n, 1))
        if n == 0:
            parts = parts[:, :0]
        betas = conv.p + parts @ w
        signs = 1.0 - 2.0 * ((parts @ negative) % 2)
        logs = log_mult + parts @ log_abs
        for beta, sign, log_c in zip(betas, signs, logs):
            scale = sign * math.exp(log_c + beta * math.log(h) - gammaln(beta + 2))
            if scale == 0:
                continue
            c, e = trapezoid_weights(beta, size)
            toeplitz += scale * c
            origin += scale * (e - c)
    out = np.convolve(toeplitz, g)[:size] + origin * g[0]
    out[0] = 0.0
    return out


def _explicit_values(sol, xs, tol):
    # power and Mittag-Leffler terms at points xs > 0
    y = np.zeros(xs.size)
    n_terms = max(len(sol.power_terms) + len(sol.ml_terms), 1)
    for t in sol.power_terms:
        y += t.coeff * xs ** t.exponent
    by_b = {}
    for t in sol.ml_terms:
        by_b.setdefault(t.b, []).append(t)
    for b, terms in by_b.items():
        scale = sum(abs(t.coeff) for t in terms)
        values = _ml_values(sol, b, xs, tol / (n_terms * scale))
        for t in terms:
            y += t.coeff * xs ** t.exponent * values
    return y


def _origin_value(sol):
    low, sign = sol.origin_behaviour()
    if low < 0:
        return math.copysign(math.inf, sign)
    return sign if low == 0 else 0.0


def eval_solution(sol, grid, tol=config.DEFAULT_TOL):
    """Sample the solution on the grid.

    At x = 0 the limit is reported when it exists; an unbounded solution gets
    +-inf there (check ``sol.unbounded_at_origin``).
    """
    x = grid.x
    y = np.zeros(x.size)
    y[1:] = _explicit_values(sol, x[1:], tol)
    if sol.convolution is not None:
        y += _convolution_values(sol, grid, tol / 2)
    y[0] = _origin_value(sol)
    return SampledFunction(grid.step, y)


def eval_at(sol, x, tol=config.DEFAULT_TOL, points=None):
    """Solution values at arbitrary points x >= 0.

    Power and Mittag-Leffler terms are evaluated pointwise.  A convolution
    with non-power forcing is sampled on a uniform grid up to max(x) and
    interpolated linearly.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("solutions live on x >= 0")
    y = np.empty(x.shape)
    pos = x > 0
    y[pos] = _explicit_values(sol, x[pos], tol)
    y[~pos] = 0.0
    conv = sol.convolution
    if conv is not None and np.any(pos):
        if isinstance(conv.forcing, Power):
            g = conv.forcing
            coef = g.scale * math.gamma(g.exponent + 1)
            xp = x[pos]
            y[pos] += coef * xp ** (conv.p + g.exponent) * _ml_values(
                sol, conv.b + g.exponent + 1, xp, tol / 2 / max(abs(coef), 1e-300))
        else:
            grid = GridSpec(float(x.max()), points or config.default_grid())
            values = _convolution_values(sol, grid, tol / 2)
            y[pos] += np.interp(x[pos], grid.x, values)
    y[~pos] = _origin_value(sol)
    return y


def residual_check(problem, sol, grid, margin=None, tol=config.DEFAULT_TOL):
    """max over [margin, X] of |D^{a0,b0} y - sum a_i D^{a_i,b_i} y - g| with numerical derivatives."""
    if sol is None:
        raise ProblemError("no solution to check")
    idx = validate(problem)
    p = idx.normalized
    y = eval_solution(sol, grid, tol)
    margin = config.DEFAULT_MARGIN_STEPS * grid.step if margin is None else margin
    lhs = None
    for i, term in enumerate(p.terms):
        if term.order == 0:
            first = max(int(math.ceil(margin / grid.step - 1e-9)), 1)
            d = SampledFunction(grid.step, y.values[first:], start=first * grid.step)
        else:
            initial = [idx.initial_value(i, k) for k in range(term.m)]
            d = hilfer_derivative_numeric(y, term.order, term.type_param, margin, initial)
        contribution = d.values if i == 0 else -term.coefficient * d.values
        lhs = contribution if lhs is None else lhs + contribution
    g = p.forcing(d.x)
    return float(np.max(np.abs(lhs - g)))


def solve_caputo(orders, coeffs, initial=(), forcing=None, interval_end=config.DEFAULT_END):
    """^cD^{alpha_0} y - sum a_i ^cD^{alpha_i} y = g with y^(k)(0) = initial[k]."""
    problem = _build(orders, coeffs, 1.0, {(0, k): v for k, v in enumerate(initial)}, forcing, interval_end)
    return solve(problem)


def solve_rl(orders, coeffs, initial=None, forcing=None, interval_end=config.DEFAULT_END):
    """Riemann-Liouville version; ``initial`` maps (term, k) to d^k I^{m_i-alpha_i} y(0+)
    (a plain sequence is taken as the leading term's values)."""
    if initial is None:
        initial = {}
    elif not isinstance(initial, dict):
        initial = {(0, k): v for k, v in enumerate(initial)}
    return solve(_build(orders, coeffs, 0.0, initial, forcing, interval_end))


def _build(orders, coeffs, type_param, initial, forcing, interval_end):
    orders = list(orders)
    coeffs = list(coeffs)
    if len(coeffs) != len(orders) - 1:
        raise ProblemError("need one coefficient per lower-order term")
    leading = FractionalTerm(orders[0], type_param)
    lower = tuple(FractionalTerm(o, type_param, c) for o, c in zip(orders[1:], coeffs))
    return FdeProblem(leading, lower, initial, forcing or Zero(), interval_end)


def composite_relaxation_problem(tau1, tau2, alpha, mu, f_gamma=0.0, f0=1.0,
                                 interval_end=config.DEFAULT_END):
    """tau1 f' + tau2^alpha D^{alpha,mu} f + f = 0, f(0+) = f0, I^{(1-mu)(1-alpha)} f(0+) = f_gamma."""
    if not 0 < alpha < 1:
        raise ProblemError("composite relaxation needs 0 < alpha < 1")
    if not (tau1 > 0 and tau2 > 0):
        raise ProblemError("relaxation times must be positive")
    leading = FractionalTerm(1.0, 1.0, tau1)
    lower = (FractionalTerm(alpha, mu, -tau2 ** alpha), FractionalTerm(0.0, 0.0, -1.0))
    return FdeProblem(leading, lower, {(0, 0): f0, (1, 0): f_gamma}, Zero(), interval_end)


def composite_relaxation(tau1, tau2, alpha, mu, f_gamma=0.0, f0=1.0, interval_end=config.DEFAULT_END):
    return solve(composite_relaxation_problem(tau1, tau2, alpha, mu, f_gamma, f0, interval_end))
