"""Problem definition, validation and the index bookkeeping of the solution.

The equation is

    D^{a0,b0} y - sum_{i=1..n} a_i D^{a_i,b_i} y = g      on (0, X]

with Hilfer derivatives D^{alpha,beta} and initial data
y_{k-gamma_i} = d^k/dx^k I^{gamma_i} y (0+), gamma_i = (1-beta_i)(m_i-alpha_i).
"""
from dataclasses import dataclass, field, replace
import math

from . import config
from .exceptions import DomainError, ProblemError, UnsupportedProblemError
from .forcing import ForcingSpec, Zero


def ceil_order(alpha):
    """Integer m with m - 1 < alpha <= m (0 for alpha == 0)."""
    alpha = float(alpha)
    if alpha < 0 or math.isnan(alpha):
        raise DomainError(f"order must be >= 0, got {alpha}")
    return int(math.ceil(alpha))


def gamma_index(alpha, beta):
    """Order of the fractional integral in the natural initial conditions."""
    if not 0 <= beta <= 1:
        raise DomainError(f"type must lie in [0, 1], got {beta}")
    return (1.0 - beta) * (ceil_order(alpha) - alpha)


@dataclass(frozen=True)
class FractionalTerm:
    order: float
    type_param: float = 0.0
    coefficient: float = 1.0

    def __post_init__(self):
        ceil_order(self.order)
        if not 0 <= self.type_param <= 1:
            raise DomainError(f"type must lie in [0, 1], got {self.type_param}")

    @property
    def m(self):
        return ceil_order(self.order)

    @property
    def gamma(self):
        return gamma_index(self.order, self.type_param)

    @property
    def rank(self):
        """m - gamma, the quantity the lower terms are ordered by."""
        return self.m - self.gamma


@dataclass(frozen=True)
class FdeProblem:
    """``leading`` carries c_0 (normalized away); ``lower`` carry a_i.

    ``initial_values`` maps (term index, derivative index) to y_{k-gamma_i};
    term index 0 is the leading term, i >= 1 index ``lower``.
    """

    leading: FractionalTerm
    lower: tuple = ()
    initial_values: dict = field(default_factory=dict)
    forcing: ForcingSpec = field(default_factory=Zero)
    interval_end: float = config.DEFAULT_END

    def __post_init__(self):
        object.__setattr__(self, "lower", tuple(self.lower))
        object.__setattr__(self, "initial_values",
                           {(int(i), int(k)): float(v) for (i, k), v in dict(self.initial_values).items()})
        if not self.interval_end > 0:
            raise ProblemError("interval_end must be positive")

    @property
    def terms(self):
        return (self.leading,) + self.lower

    @property
    def n(self):
        return len(self.lower)

    def with_initial_values(self, values):
        return replace(self, initial_values=values)

    def with_forcing(self, forcing):
        return replace(self, forcing=forcing)


@dataclass(frozen=True)
class AllGammaEqual:
    name = "all_gamma_equal"


@dataclass(frozen=True)
class Split:
    l: int
    M: int
    name = "split"


@dataclass(frozen=True)
class DerivedIndices:
    m: tuple
    gamma: tuple
    case: object
    lk_table: dict
    normalized: FdeProblem
    # order[i] is the caller's index of normalized term i
    order: tuple

    @property
    def shared_group(self):
        """Terms whose gamma equals gamma_0; their initial data coincide."""
        top = len(self.m) if isinstance(self.case, AllGammaEqual) else self.case.l
        return range(top)

    def initial_value(self, i, k):
        """Effective y_{k-gamma_i} of normalized term i (0 when not given)."""
        values = self.normalized.initial_values
        if i in self.shared_group:
            for j in self.shared_group:
                if (j, k) in values:
                    return values[(j, k)]
            return 0.0
        return values.get((i, k), 0.0)

    def has_initial_data(self):
        return any(v != 0 for v in self.normalized.initial_values.values())


def compute_lk(k, m, range_top):
    """l_k: the index with m[l_k] >= k+1 and m[l_k+1] <= k within 0..range_top.

    Edge rules: every m_i <= k gives 0, every m_i >= k+1 gives range_top.
    """
    for l in range(range_top):
        if m[l] >= k + 1 and m[l + 1] <= k:
            return l
    window = m[:range_top + 1]
    if all(mi >= k + 1 for mi in window):
        return range_top
    return 0


def _snap(values, ref):
    return tuple(ref if abs(v - ref) <= config.GAMMA_SNAP else v for v in values)


def normalize(problem):
    """Divide through by the leading coefficient and order the lower terms.

    Returns ``(normalized_problem, order)``.
    """
    c0 = problem.leading.coefficient
    if c0 == 0:
        raise ProblemError("leading coefficient must be nonzero")
    a0 = problem.leading.order
    for i, term in enumerate(problem.lower, start=1):
        if not a0 > term.order:
            raise ProblemError(f"leading order not dominant: alpha_0={a0} <= alpha_{i}={term.order}")
    terms = problem.terms
    for (i, k), _ in problem.initial_values.items():
        if not 0 <= i < len(terms) or not 0 <= k <= terms[i].m - 1:
            raise ProblemError(f"invalid initial-value index ({i}, {k})")

    ranked = sorted(range(1, len(terms)), key=lambda i: -terms[i].rank)
    order = (0,) + tuple(ranked)
    lower = tuple(replace(terms[i], coefficient=terms[i].coefficient / c0) for i in ranked)
    where = {old: new for new, old in enumerate(order)}
    values = {(where[i], k): v for (i, k), v in problem.initial_values.items()}
    forcing = problem.forcing if c0 == 1 else problem.forcing.scaled(1.0 / c0)
    normalized = FdeProblem(replace(problem.leading, coefficient=1.0), lower, values, forcing,
                            problem.interval_end)
    return normalized, order


def validate(problem):
    """Check the problem and compute every index quantity the solution needs."""
    normalized, order = normalize(problem)
    terms = normalized.terms
    m = tuple(t.m for t in terms)
    gamma = _snap([t.gamma for t in terms], terms[0].gamma)
    ranks = [mi - gi for mi, gi in zip(m, gamma)]
    for i in range(1, len(terms)):
        if ranks[i] > ranks[0] + config.GAMMA_SNAP:
            raise ProblemError(
                f"term {order[i]} has m - gamma = {ranks[i]:g} above the leading term's {ranks[0]:g}; "
                "the leading term must come first in the ordering")

    split_at = next((i for i in range(1, len(terms)) if gamma[i] != gamma[0]), None)
    if split_at is None:
        case = AllGammaEqual()
        range_top = len(terms) - 1
    else:
        # order-0 terms carry no initial data, so their gamma is irrelevant
        if any(gamma[i] == gamma[0] and m[i] > 0 for i in range(split_at + 1, len(terms))):
            raise UnsupportedProblemError(
                "terms sharing gamma_0 are not contiguous after ordering; only a single split is supported")
        l = split_at
        M = math.floor(m[l] - gamma[l] - 1 + gamma[0] + config.GAMMA_SNAP)
        case = Split(l, M)
        range_top = l - 1
    lk_table = {k: compute_lk(k, m, range_top) for k in range(m[0])}
    idx = DerivedIndices(m, gamma, case, lk_table, normalized, order)
    _check_shared_values(idx)
    return idx


def _check_shared_values(idx):
    values = idx.normalized.initial_values
    for k in range(idx.m[0]):
        supplied = {values[(i, k)] for i in idx.shared_group if (i, k) in values}
        if len(supplied) > 1:
            raise ProblemError(
                f"inconsistent initial values for derivative index {k}: terms with equal gamma "
                f"share one initial quantity, got {sorted(supplied)}")


@dataclass(frozen=True)
class ExistenceReport:
    verdict: str
    # (caller's term index, derivative index, supplied value)
    mandatory_zero: tuple
    case: object

    @property
    def solvable(self):
        return self.verdict == "solvable"

    @property
    def offending(self):
        return tuple(entry for entry in self.mandatory_zero if entry[2] != 0)

    def to_dict(self):
        case = {"kind": self.case.name}
        if isinstance(self.case, Split):
            case.update(l=self.case.l, M=self.case.M)
        return {
            "verdict": self.verdict,
            "case": case,
            "mandatory_zero": [{"term": i, "k": k, "value": v} for i, k, v in self.mandatory_zero],
        }


def existence_report(problem, idx=None):
    """Which initial values must vanish, and whether the supplied ones do."""
    idx = validate(problem) if idx is None else idx
    if isinstance(idx.case, AllGammaEqual):
        return ExistenceReport("solvable", (), idx.case)
    l, M = idx.case.l, idx.case.M
    pairs = [(i, k) for i in range(l, len(idx.m)) for k in range(idx.m[i])]
    pairs += [(i, k) for i in range(l) for k in range(min(M, idx.m[i] - 1) + 1)]
    entries = tuple((idx.order[i], k, idx.initial_value(i, k)) for i, k in pairs)
    # exact test: the condition is algebraic
    verdict = "unsolvable" if any(v != 0.0 for _, _, v in entries) else "solvable"
    return ExistenceReport(verdict, entries, idx.case)
