"""Multi-term linear fractional differential equations with Hilfer derivatives.

Closed-form solutions through multivariate Mittag-Leffler functions, the
existence test on initial data, and a Volterra time-stepping reference.
"""
from .estimators import HilferFDESolver, MittagLefflerTransformer, VolterraOracle
from .exceptions import (DomainError, FdeError, GridError, ProblemError, StepSizeError,
                         TruncationError, UnsupportedProblemError)
from .forcing import Exponential, Power, Sinusoid, Tabulated, Zero
from .fracops import (GridSpec, SampledFunction, hilfer_derivative_numeric, rl_integral,
                      singular_convolution)
from .oracle import compare, volterra_solve
from .problem import (DerivedIndices, ExistenceReport, FdeProblem, FractionalTerm, ceil_order,
                      existence_report, gamma_index, validate)
from .solver import (ClosedFormSolution, composite_relaxation, composite_relaxation_problem,
                     eval_at, eval_solution, initial_function, residual_check, solve,
                     solve_caputo, solve_homogeneous_ic, solve_rl)
from .specfun import MlSpec, MlValue, gamma_fn, ml_eval, ml_scalar, recip_gamma

__version__ = "0.1.0"
