"""Shared fixtures for the test suite."""

import numpy as np
import pytest

from src.models import IterRecord, ProblemKind, TerminationStatus
from src.solvers.trace import ConvergenceTrace
from src.tensor import FactorSet, random_cp_problem


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def exact_problem():
    """Exact-rank 6x6x6, r=3 problem with its generating factors."""
    return random_cp_problem((6, 6, 6), 3, ProblemKind.EXACT_RANK, seed=7)


@pytest.fixture
def small_exact():
    """Exact-rank 5x5x5, r=2 problem (Hessian-sized)."""
    return random_cp_problem((5, 5, 5), 2, ProblemKind.EXACT_RANK, seed=11)


@pytest.fixture
def dense_problem():
    """Random-dense 4x3x2, r=2 problem."""
    return random_cp_problem((4, 3, 2), 2, ProblemKind.RANDOM_DENSE, seed=3)


@pytest.fixture
def make_trace():
    """Build a ConvergenceTrace from err_sq / f_val lists."""

    def _make(err_sq, f_vals=None, lam=1.0, accel=(), f_initial=None):
        f_vals = f_vals if f_vals is not None else [0.0] * len(err_sq)
        records = [
            IterRecord(
                n=n,
                err_sq=e,
                f_val=f,
                grad_norm=0.0,
                lambda_used=lam,
                accel_applied=n in accel,
            )
            for n, (e, f) in enumerate(zip(err_sq, f_vals), start=1)
        ]
        ones = np.ones((1, 1))
        return ConvergenceTrace(
            records=records,
            status=TerminationStatus.CONVERGED,
            final_factors=FactorSet(ones, ones, ones),
            f_initial=f_initial,
        )

    return _make
