"""Tests for seeded problem generation and the tensor text format."""

import itertools

import numpy as np
import pytest

from src.models import ProblemKind
from src.tensor import Tensor3, initial_guess, matricize, random_cp_problem, read_tensor, residual_f, write_tensor
from src.tensor.problems import collinear_columns
from src.utils.errors import ShapeMismatchError


@pytest.mark.parametrize("kind", list(ProblemKind))
def test_same_seed_gives_identical_problem(kind):
    first = random_cp_problem((5, 4, 3), 2, kind, seed=42)
    second = random_cp_problem((5, 4, 3), 2, kind, seed=42)
    np.testing.assert_array_equal(first.tensor.data, second.tensor.data)
    np.testing.assert_array_equal(first.initial.flat, second.initial.flat)


def test_different_seeds_differ():
    a = random_cp_problem((5, 4, 3), 2, seed=1)
    b = random_cp_problem((5, 4, 3), 2, seed=2)
    assert not np.array_equal(a.tensor.data, b.tensor.data)
    assert not np.array_equal(a.initial.flat, b.initial.flat)


def test_initial_guess_does_not_depend_on_kind():
    guesses = [random_cp_problem((5, 4, 3), 2, kind, seed=9).initial.flat for kind in ProblemKind]
    for g in guesses[1:]:
        np.testing.assert_array_equal(g, guesses[0])
    np.testing.assert_array_equal(initial_guess((5, 4, 3), 2, 9).flat, guesses[0])


def test_exact_rank_tensor_has_zero_residual_at_generating_factors():
    problem = random_cp_problem((6, 5, 4), 3, ProblemKind.EXACT_RANK, seed=0)
    assert problem.generating is not None
    assert residual_f(problem.tensor, problem.generating) <= 1e-20


def test_random_dense_has_no_generating_factors():
    assert random_cp_problem((3, 3, 3), 2, ProblemKind.RANDOM_DENSE, seed=0).generating is None


def _min_abs_cos(factor):
    unit = factor / np.linalg.norm(factor, axis=0, keepdims=True)
    cos = unit.T @ unit
    return min(abs(cos[s, u]) for s, u in itertools.combinations(range(factor.shape[1]), 2))


def test_swamp_columns_are_collinear():
    problem = random_cp_problem((10, 10, 10), 10, ProblemKind.SWAMP, seed=5, collinearity=0.99)
    assert _min_abs_cos(problem.generating.A) >= 0.99


def test_swamp_collinearity_is_confined_to_a():
    problem = random_cp_problem((10, 10, 10), 10, ProblemKind.SWAMP, seed=5, collinearity=0.99)
    assert _min_abs_cos(problem.generating.B) < 0.9
    assert _min_abs_cos(problem.generating.C) < 0.9


def test_swamp_uses_configured_collinearity_by_default():
    explicit = random_cp_problem((4, 4, 4), 3, ProblemKind.SWAMP, seed=1, collinearity=0.99)
    default = random_cp_problem((4, 4, 4), 3, ProblemKind.SWAMP, seed=1)
    np.testing.assert_array_equal(explicit.tensor.data, default.tensor.data)


def test_collinearity_must_be_below_one(rng):
    with pytest.raises(ValueError):
        collinear_columns(rng, 4, 2, 1.0)


@pytest.mark.parametrize("dims, r", [((0, 3, 3), 2), ((3, 3), 2), ((3, 3, 3), 0)])
def test_invalid_problem_shapes(dims, r):
    with pytest.raises(ShapeMismatchError):
        random_cp_problem(dims, r)


# =============================================================================
# Text format
# =============================================================================

def test_write_then_read_is_bit_exact(tmp_path, rng):
    t = Tensor3(rng.standard_normal((3, 4, 5)) * 1e-3)
    path = write_tensor(t, tmp_path / "t.txt")
    assert path.read_text().splitlines()[0] == "3 4 5"
    np.testing.assert_array_equal(read_tensor(path).data, t.data)


def test_hand_written_file_follows_canonical_layout(tmp_path):
    path = tmp_path / "hand.txt"
    path.write_text("2 2 2\n1 2 3 4\n5 6 7 8\n")
    np.testing.assert_array_equal(matricize(read_tensor(path), 1), [[1, 3, 5, 7], [2, 4, 6, 8]])


@pytest.mark.parametrize("content", ["2 2\n1 2 3 4\n", "2 2 2\n1 2 3\n", "2 2 x\n1\n", "2 2 2\n1 2 3 4 5 6 7 oops\n"])
def test_malformed_files_are_rejected(tmp_path, content):
    path = tmp_path / "bad.txt"
    path.write_text(content)
    with pytest.raises(ShapeMismatchError):
        read_tensor(path)


def test_missing_file_raises(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_tensor(tmp_path / "nope.txt")
