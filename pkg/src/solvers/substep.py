"""Closed-form solution of one (regularized) least-squares factor update."""

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, pinvh

from src.utils.errors import NumericalFailure, ShapeMismatchError


def solve_gram_system(
    rhs: np.ndarray,
    gram: np.ndarray,
    lam: float,
    prev: np.ndarray,
    pinv_threshold: float = 1e-12,
) -> np.ndarray:
    """Solve X (G + lam I) = rhs + lam * prev for X.

    lam > 0 goes through a Cholesky factorization of the SPD matrix
    G + lam I. lam == 0 uses the pseudo-inverse of G with eigenvalues below
    ``pinv_threshold`` times the largest treated as zero.

    Args:
        rhs: T(k) times the Khatri-Rao matrix, shape n x r
        gram: Khatri-Rao Gram matrix, r x r symmetric PSD
        lam: Proximal weight (>= 0)
        prev: Current value of the factor, shape n x r
        pinv_threshold: Relative cutoff of the lam == 0 pseudo-inverse

    Returns:
        The updated factor, shape n x r
    """
    r = gram.shape[0]
    if gram.shape != (r, r) or rhs.shape[1] != r or prev.shape != rhs.shape:
        raise ShapeMismatchError(
            f"substep shapes disagree: rhs {rhs.shape}, gram {gram.shape}, prev {prev.shape}"
        )
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    if not (np.isfinite(rhs).all() and np.isfinite(gram).all()):
        raise NumericalFailure("non-finite entries in the substep system")

    if lam == 0:
        return rhs @ pinvh(gram, atol=0.0, rtol=pinv_threshold)

    try:
        factor = cho_factor(gram + lam * np.eye(r))
    except LinAlgError as e:
        raise NumericalFailure(f"Cholesky factorization failed: {e}") from e
    # G + lam I is symmetric, so X M = B  <=>  M X^T = B^T
    return cho_solve(factor, (rhs + lam * prev).T).T


def solve_substep(
    rhs: np.ndarray,
    kr: np.ndarray,
    lam: float,
    prev: np.ndarray,
    pinv_threshold: float = 1e-12,
) -> np.ndarray:
    """Update one factor from its matricized right-hand side and Khatri-Rao matrix.

    lam > 0: (rhs + lam prev)(kr^T kr + lam I)^-1.
    lam = 0: rhs (kr^T kr)^+, the minimum-norm least-squares update.

    Args:
        rhs: T(k) kr
        kr: Khatri-Rao product of the two fixed factors
        lam: Proximal weight
        prev: Current value of the factor
        pinv_threshold: Relative cutoff of the lam == 0 pseudo-inverse
    """
    kr = np.asarray(kr, dtype=float)
    return solve_gram_system(np.asarray(rhs, dtype=float), kr.T @ kr, lam,
                             np.asarray(prev, dtype=float), pinv_threshold)
