"""scikit-learn style wrappers.

The "training data" of an equation solver is the problem itself, so ``fit``
takes an :class:`FdeProblem` and ``predict`` maps abscissae to solution
values.
"""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import config
from .exceptions import ProblemError
from .fracops import GridSpec
from .oracle import volterra_solve
from .problem import FdeProblem
from .solver import eval_at, solve
from .specfun import MlSpec, ml_series


def _abscissae(X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 2 and X.shape[1] == 1:
        X = X[:, 0]
    return check_array(X, ensure_2d=False, ensure_all_finite=True)


def _check_problem(problem):
    if not isinstance(problem, FdeProblem):
        raise TypeError(f"expected an FdeProblem, got {type(problem).__name__}")
    return problem


class HilferFDESolver(BaseEstimator):
    """Closed-form solver.

    Parameters
    ----------
    tol : float
        Absolute truncation budget for Mittag-Leffler series.
    grid_points : int or None
        Grid used when a convolution must be sampled numerically.

    Attributes
    ----------
    report_ : ExistenceReport
    solution_ : ClosedFormSolution or None
        None when the initial data admit no solution.
    """

    def __init__(self, tol=config.DEFAULT_TOL, grid_points=None):
        self.tol = tol
        self.grid_points = grid_points

    def fit(self, problem, y=None):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        self.problem_ = _check_problem(problem)
        self.report_, self.solution_ = solve(problem)
        return self

    def predict(self, X):
        check_is_fitted(self, "report_")
        if self.solution_ is None:
            raise ProblemError(f"no solution exists: initial values {self.report_.offending} must vanish")
        return eval_at(self.solution_, _abscissae(X), self.tol, self.grid_points)


class VolterraOracle(BaseEstimator):
    """Reference solution by time stepping the Volterra form on a uniform grid."""

    def __init__(self, grid_points=None):
        self.grid_points = grid_points

    def fit(self, problem, y=None):
        problem = _check_problem(problem)
        points = self.grid_points or config.default_grid()
        self.grid_ = GridSpec(problem.interval_end, points)
        self.samples_ = volterra_solve(problem, self.grid_)
        return self

    def predict(self, X):
        check_is_fitted(self, "samples_")
        x = _abscissae(X)
        if np.any(x < 0) or np.any(x > self.grid_.interval_end * (1 + 1e-12)):
            raise ValueError("abscissae outside the solved interval")
        return np.interp(x, self.samples_.x, self.samples_.values)


class MittagLefflerTransformer(TransformerMixin, BaseEstimator):
    """Map rows z = (z_1..z_n) to E_{weights, b}(z)."""

    def __init__(self, weights=(1.0,), b=1.0, tol=config.DEFAULT_TOL):
        self.weights = weights
        self.b = b
        self.tol = tol

    def fit(self, X, y=None):
        self.spec_ = MlSpec(tuple(float(w) for w in self.weights), float(self.b))
        X = check_array(X)
        if X.shape[1] != self.spec_.n:
            raise ValueError(f"expected {self.spec_.n} columns, got {X.shape[1]}")
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "spec_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} columns, got {X.shape[1]}")
        values, _, _ = ml_series(self.spec_.weights, self.spec_.b, X.T, self.tol)
        return values.reshape(-1, 1)
