"""Sweep operators and the outer iteration loop."""

from src.solvers.runner import run, solver_config_for
from src.solvers.substep import solve_gram_system, solve_substep
from src.solvers.sweeps import als_sweep, make_sweep, rals_sweep
from src.solvers.trace import TRACE_COLUMNS, ConvergenceTrace

__all__ = [
    "TRACE_COLUMNS",
    "ConvergenceTrace",
    "als_sweep",
    "make_sweep",
    "rals_sweep",
    "run",
    "solve_gram_system",
    "solve_substep",
    "solver_config_for",
]
