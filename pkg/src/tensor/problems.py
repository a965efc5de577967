"""Seeded test problems: random dense, exact rank, and swamp-prone tensors."""

import logging
from typing import NamedTuple, Optional, Sequence

import numpy as np

from src.config import bench_settings
from src.models import ProblemKind
from src.tensor.core import FactorSet, Tensor3, _check_dims, cp_reconstruct
from src.utils.errors import ShapeMismatchError

logger = logging.getLogger(__name__)


class CPProblem(NamedTuple):
    """A tensor, the initial guess to start from, and its generating factors (if any)."""
    tensor: Tensor3
    initial: FactorSet
    generating: Optional[FactorSet] = None


def random_factors(rng: np.random.Generator, dims: Sequence[int], r: int) -> FactorSet:
    """I.i.d. standard normal factor matrices."""
    return FactorSet(*(rng.standard_normal((d, r)) for d in dims))


def collinear_columns(rng: np.random.Generator, n: int, r: int, collinearity: float) -> np.ndarray:
    """n x r matrix whose columns pairwise satisfy |cos angle| >= collinearity.

    Each column is u_s = v + delta * w_s / ||w_s|| for a shared unit vector v.
    A point at distance delta < 1 from a unit vector is within arcsin(delta)
    of it, so two columns are within 2 arcsin(delta) of each other and
    cos >= 1 - 2 delta^2. delta is taken 10% inside that bound.
    """
    if not 0.0 <= collinearity < 1.0:
        raise ValueError(f"collinearity must lie in [0, 1), got {collinearity}")
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    w = rng.standard_normal((n, r))
    w /= np.linalg.norm(w, axis=0, keepdims=True)
    delta = 0.9 * np.sqrt((1.0 - collinearity) / 2.0)
    return v[:, None] + delta * w


def initial_guess(dims: Sequence[int], r: int, seed: int) -> FactorSet:
    """The initial factors random_cp_problem would draw for this seed."""
    _, guess_seq = np.random.SeedSequence(seed).spawn(2)
    return random_factors(np.random.default_rng(guess_seq), _check_dims(dims), r)


def random_cp_problem(
    dims: Sequence[int],
    r: int,
    kind: ProblemKind = ProblemKind.RANDOM_DENSE,
    seed: int = 0,
    collinearity: Optional[float] = None,
) -> CPProblem:
    """Generate a deterministic CP approximation problem.

    The tensor and the initial guess come from two independent substreams
    spawned from ``seed``, so changing the kind never changes the guess.

    Args:
        dims: (I, J, K)
        r: Number of rank-one components
        kind: random-dense, exact-rank or swamp
        seed: Base seed
        collinearity: Pairwise |cos| lower bound of the swamp generating
            columns of A (swamp kind only); defaults to the
            configured swamp collinearity

    Returns:
        CPProblem(tensor, initial, generating); ``generating`` is None for
        random-dense tensors
    """
    dims = _check_dims(dims)
    if r < 1:
        raise ShapeMismatchError(f"r must be positive, got {r}")
    kind = ProblemKind(kind)
    if collinearity is None:
        collinearity = bench_settings.swamp_collinearity

    tensor_seq, _ = np.random.SeedSequence(seed).spawn(2)
    tensor_rng = np.random.default_rng(tensor_seq)

    generating = None
    if kind is ProblemKind.RANDOM_DENSE:
        tensor = Tensor3(tensor_rng.standard_normal(dims))
    elif kind is ProblemKind.EXACT_RANK:
        generating = random_factors(tensor_rng, dims, r)
        tensor = cp_reconstruct(generating, dims)
    else:
        I, J, K = dims
        generating = FactorSet(
            collinear_columns(tensor_rng, I, r, collinearity),
            tensor_rng.standard_normal((J, r)),
            tensor_rng.standard_normal((K, r)),
        )
        tensor = cp_reconstruct(generating, dims)

    initial = initial_guess(dims, r, seed)
    logger.debug("Generated %s problem dims=%s r=%d seed=%d", kind.value, dims, r, seed)
    return CPProblem(tensor, initial, generating)
