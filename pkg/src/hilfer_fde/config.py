"""Centralized defaults for the solver, the oracle and the CLI."""
import os

DEFAULT_GRID = 1024
DEFAULT_END = 1.0
DEFAULT_TOL = 1e-10
# residual/derivative margin, in grid steps
DEFAULT_MARGIN_STEPS = 10

MIN_GRID = 16
MAX_LAYERS = 5000
MAX_TERMS = 2_000_000
MAX_ML_ARGUMENT = 1e4
MAX_ML_DIMENSION = 6
GAMMA_SNAP = 1e-12

# cmd_check pass thresholds
CHECK_MAX_RESIDUAL = 5e-2
CHECK_MAX_ORACLE_REL = 1e-3
CHECK_ORACLE_SKIP = 10


def default_grid():
    value = os.environ.get("FDE_DEFAULT_GRID")
    if value is None:
        return DEFAULT_GRID
    return int(value)
