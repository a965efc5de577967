"""Aitken-Steffensen extrapolation: the scalar formula and the matrix step T.

The matrix step works on the stacked (I+J+K) x r factor matrix X:

    X* = X - Z,   Z (S(S(X)) - 2 S(X) + X)^T = (S(X) - X)(S(X) - X)^T

The system has (I+J+K)^2 equations in (I+J+K) r unknowns and is solved in the
minimum-norm least-squares sense, Z = R (D2^T)^+, so a zero right-hand side
(a fixed point of S) always gives Z = 0.
"""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import pinv

from src.tensor.core import FactorSet
from src.utils.errors import DegenerateInputError, NumericalFailure

logger = logging.getLogger(__name__)

Sweep = Callable[[FactorSet], FactorSet]


def scalar_aitken(x0: float, x1: float, x2: float) -> float:
    """Aitken's delta-squared extrapolation of three consecutive iterates.

    Raises:
        DegenerateInputError: if x2 - 2 x1 + x0 == 0
    """
    second = x2 - 2.0 * x1 + x0
    if second == 0:
        raise DegenerateInputError(f"zero second difference for ({x0}, {x1}, {x2})")
    return x0 - (x1 - x0) ** 2 / second


@dataclass(frozen=True, eq=False)
class AccelStep:
    """Everything computed by one matrix acceleration step."""
    x_in: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    z: np.ndarray
    x_out: np.ndarray
    ls_residual: float
    degenerate: bool
    s1_factors: FactorSet
    out_factors: FactorSet


def accel_step(x: FactorSet, sweep: Sweep, pinv_threshold: float = 1e-12) -> AccelStep:
    """Apply the accelerated update T to x.

    Args:
        x: Current iterate X(n)
        sweep: The variant's one-sweep operator (S_ALS, or S at the current lambda)
        pinv_threshold: Relative singular value cutoff for (D2^T)^+

    Returns:
        AccelStep with x_out = x_in - z
    """
    s1_factors = sweep(x)
    s2_factors = sweep(s1_factors)

    x_in = x.stacked
    s1 = s1_factors.stacked
    s2 = s2_factors.stacked
    delta = s1 - x_in
    d2t = (s2 - 2.0 * s1 + x_in).T
    rhs = delta @ delta.T

    if not (np.isfinite(d2t).all() and np.isfinite(rhs).all()):
        raise NumericalFailure("non-finite sweep output inside the acceleration step")

    # Second differences at rounding level carry no direction information.
    floor = np.finfo(float).eps * np.linalg.norm(x_in)
    d2t_pinv, rank = pinv(d2t, atol=floor, rtol=pinv_threshold, return_rank=True)
    z = rhs @ d2t_pinv
    x_out = x_in - z

    if not np.isfinite(x_out).all():
        raise NumericalFailure("non-finite accelerated iterate")

    degenerate = rank < min(d2t.shape)
    ls_residual = float(np.linalg.norm(z @ d2t - rhs))
    if degenerate:
        logger.warning("Acceleration system is rank-deficient (rank %d of %d); using minimum-norm solution",
                       rank, min(d2t.shape))
    logger.debug("Acceleration step: ||Z||_F=%.3e, residual=%.3e", np.linalg.norm(z), ls_residual)

    return AccelStep(
        x_in=x_in,
        s1=s1,
        s2=s2,
        z=z,
        x_out=x_out,
        ls_residual=ls_residual,
        degenerate=degenerate,
        s1_factors=s1_factors,
        out_factors=FactorSet.from_stacked(x_out, x.dims),
    )
