"""Tests for the scalar and matrix Aitken-Steffensen steps."""

import numpy as np
import pytest

from src.accel import accel_step, scalar_aitken
from src.solvers import make_sweep
from src.tensor import FactorSet
from src.utils.errors import DegenerateInputError, NumericalFailure

DIMS = (5, 4, 3)
R = 2


def test_scalar_aitken_on_halving_sequence():
    assert scalar_aitken(2.0, 1.5, 1.25) == 1.0


def test_scalar_aitken_on_geometric_sequence():
    assert scalar_aitken(5.0, 4.8, 4.62) == pytest.approx(3.0, abs=1e-12)


def test_scalar_aitken_rejects_arithmetic_sequence():
    with pytest.raises(DegenerateInputError):
        scalar_aitken(0.0, 1.0, 2.0)


def affine_sweep(center: np.ndarray, rho: float):
    def sweep(x: FactorSet) -> FactorSet:
        return FactorSet.from_stacked(center + rho * (x.stacked - center), DIMS)
    return sweep


@pytest.mark.parametrize("rho", [0.3, 0.5, 0.9])
def test_affine_contraction_is_solved_in_one_step(rng, rho):
    center = rng.standard_normal((sum(DIMS), R))
    for _ in range(5):
        x = FactorSet.from_stacked(rng.standard_normal((sum(DIMS), R)), DIMS)
        step = accel_step(x, affine_sweep(center, rho))
        assert np.abs(step.x_out - center).max() <= 1e-8
        assert not step.degenerate
        assert step.ls_residual <= 1e-8 * (1.0 + np.linalg.norm((step.s1 - step.x_in) @ (step.s1 - step.x_in).T))
        assert step.out_factors.dims == DIMS


def test_fixed_point_is_preserved(exact_problem):
    t, _, x = exact_problem
    step = accel_step(x, make_sweep(t, 1.0))
    assert np.linalg.norm(step.z) <= 1e-10
    assert np.abs(step.x_out - x.stacked).max() <= 1e-10


def test_stationary_sweep_is_degenerate_but_finite(rng):
    x = FactorSet.from_stacked(rng.standard_normal((sum(DIMS), R)), DIMS)
    step = accel_step(x, lambda f: f)
    assert step.degenerate
    assert not step.z.any()
    np.testing.assert_array_equal(step.x_out, x.stacked)


def test_non_finite_sweep_output_raises(rng):
    x = FactorSet.from_stacked(rng.standard_normal((sum(DIMS), R)), DIMS)
    nan = FactorSet.from_stacked(np.full((sum(DIMS), R), np.nan), DIMS)
    with pytest.raises(NumericalFailure):
        accel_step(x, lambda f: nan)


def test_step_keeps_sweep_outputs(exact_problem):
    t, x0, _ = exact_problem
    sweep = make_sweep(t, 1.0)
    step = accel_step(x0, sweep)
    s1 = sweep(x0)
    np.testing.assert_array_equal(step.s1, s1.stacked)
    np.testing.assert_array_equal(step.s2, sweep(s1).stacked)
    np.testing.assert_array_equal(step.x_out, step.x_in - step.z)
