"""Local rate predictor from the block splitting of the Hessian.

With H = D - L - U split along the (A, B, C) blocks and M = lam I + D - L,
one proximal sweep linearizes near a minimizer to e -> (I - M^-1 H) e.
Directions in the null space of H (the scaling indeterminacy of CP factors)
are left unchanged by that map; they carry eigenvalue 1 but no error
component along the converging sequence, so the predictor restricts the
iteration matrix to range(H).
"""

import logging
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import LinAlgError, eigh, solve

from src.config import bench_settings
from src.models import SpectralPrediction
from src.tensor.core import FactorSet, Tensor3, gradient_f, gradient_norm
from src.utils.errors import NumericalFailure, ShapeMismatchError

logger = logging.getLogger(__name__)


def hessian_fd(
    t: Tensor3,
    x: FactorSet,
    step: Optional[float] = None,
    symmetrize: bool = True,
) -> np.ndarray:
    """Hessian of f over the flat (A, B, C) vector by central differences of the gradient.

    Args:
        t: Tensor
        x: Point of evaluation
        step: Relative step; coordinate i uses step * (1 + |x_i|)
        symmetrize: Return (H + H^T) / 2 instead of the raw estimate

    Returns:
        Matrix of size r(I+J+K)
    """
    if step is None:
        step = bench_settings.diagnostic("hessian_fd_step")
    dims, r = x.dims, x.r
    base = x.flat
    size = base.size
    hess = np.empty((size, size))
    for i in range(size):
        h = step * (1.0 + abs(base[i]))
        up, down = base.copy(), base.copy()
        up[i] += h
        down[i] -= h
        g_up = gradient_f(t, FactorSet.from_flat(up, dims, r)).flat
        g_down = gradient_f(t, FactorSet.from_flat(down, dims, r)).flat
        hess[:, i] = (g_up - g_down) / (2.0 * h)
    if symmetrize:
        hess = 0.5 * (hess + hess.T)
    return hess


def contraction_radius(
    hess: np.ndarray,
    block_sizes: Sequence[int],
    lam: float,
    null_tol: Optional[float] = None,
) -> SpectralPrediction:
    """Spectral radius of I - M^-1 H on range(H), M = lam I + D - L.

    Args:
        hess: Symmetric Hessian
        block_sizes: Sizes of the diagonal blocks (I r, J r, K r for CP factors)
        lam: Proximal weight in M
        null_tol: Eigenvalues of H at or below null_tol * max|eig| count as null

    Returns:
        SpectralPrediction; rho is 1 when H has no range (no contraction signal)
    """
    if null_tol is None:
        null_tol = bench_settings.diagnostic("null_space_tol")
    hess = np.asarray(hess, dtype=float)
    size = hess.shape[0]
    if hess.shape != (size, size) or sum(block_sizes) != size:
        raise ShapeMismatchError(f"Hessian of shape {hess.shape} does not split into blocks {list(block_sizes)}")

    # lam I + D - L is the block lower triangle of H (diagonal blocks included)
    lower = np.zeros_like(hess)
    offset = 0
    for size_b in block_sizes:
        lower[offset:offset + size_b, :offset + size_b] = hess[offset:offset + size_b, :offset + size_b]
        offset += size_b
    m = lam * np.eye(size) + lower

    try:
        iteration = np.eye(size) - solve(m, hess)
    except LinAlgError as e:
        raise NumericalFailure(f"M = lam I + D - L is singular: {e}") from e

    eigvals, eigvecs = eigh(hess)
    scale = np.abs(eigvals).max() if size else 0.0
    range_mask = np.abs(eigvals) > null_tol * scale if scale > 0 else np.zeros(size, dtype=bool)
    null_dim = int(size - range_mask.sum())
    if not range_mask.any():
        return SpectralPrediction(rho=1.0, hessian_dim=size, lam=lam, null_dim=null_dim)

    # I - M^-1 H fixes null(H); on the orthonormal basis W of range(H) the
    # quotient map is W^T (I - M^-1 H) W.
    w = eigvecs[:, range_mask]
    restricted = w.T @ iteration @ w
    rho = float(np.abs(np.linalg.eigvals(restricted)).max())
    return SpectralPrediction(rho=rho, hessian_dim=size, lam=lam, null_dim=null_dim)


def predict_contraction(
    t: Tensor3,
    x_star: FactorSet,
    lam: float,
    stationarity_tol: float = 1e-4,
) -> SpectralPrediction:
    """Predict the local linear rate of the proximal sweep at x_star.

    Args:
        t: Tensor
        x_star: Approximately stationary point (end of a converged run)
        lam: Proximal weight of the sweep
        stationarity_tol: Warn when ||grad f(x_star)|| / (1 + ||x_star||) exceeds this
    """
    grad = gradient_norm(t, x_star) / (1.0 + np.linalg.norm(x_star.flat))
    if grad > stationarity_tol:
        logger.warning("predict_contraction at a non-stationary point (relative gradient %.2e)", grad)

    hess = hessian_fd(t, x_star)
    blocks = [d * x_star.r for d in x_star.dims]
    prediction = contraction_radius(hess, blocks, lam)
    logger.info("Predicted contraction rho=%.6f (dim %d, null %d)",
                prediction.rho, prediction.hessian_dim, prediction.null_dim)
    return prediction
