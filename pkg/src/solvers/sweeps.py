"""One Gauss-Seidel sweep over the factors: S_ALS (lam = 0) and S (lam > 0).

Each sweep updates A from (B, C), then B from (C, new A), then C from
(new A, new B).
"""

from typing import Callable

from src.solvers.substep import solve_substep
from src.tensor.core import FactorSet, Tensor3, khatri_rao
from src.utils.errors import ShapeMismatchError

Sweep = Callable[[FactorSet], FactorSet]


def _sweep(t: Tensor3, x: FactorSet, lam: float, pinv_threshold: float) -> FactorSet:
    if t.dims != x.dims:
        raise ShapeMismatchError(f"factor dims {x.dims} do not match tensor dims {t.dims}")
    t1, t2, t3 = t.unfoldings

    kr = khatri_rao(x.C, x.B)
    a = solve_substep(t1 @ kr, kr, lam, x.A, pinv_threshold)

    kr = khatri_rao(x.C, a)
    b = solve_substep(t2 @ kr, kr, lam, x.B, pinv_threshold)

    kr = khatri_rao(b, a)
    c = solve_substep(t3 @ kr, kr, lam, x.C, pinv_threshold)

    return FactorSet(a, b, c)


def als_sweep(t: Tensor3, x: FactorSet, pinv_threshold: float = 1e-12) -> FactorSet:
    """S_ALS(x): each factor is an exact (minimum-norm) least-squares minimizer."""
    return _sweep(t, x, 0.0, pinv_threshold)


def rals_sweep(t: Tensor3, x: FactorSet, lam: float, pinv_threshold: float = 1e-12) -> FactorSet:
    """S(x): each factor minimizes f plus (lam/2)||. - previous||_F^2."""
    if lam <= 0:
        raise ValueError(f"rals_sweep needs lambda > 0, got {lam}")
    return _sweep(t, x, lam, pinv_threshold)


def make_sweep(t: Tensor3, lam: float, pinv_threshold: float = 1e-12) -> Sweep:
    """Bind the tensor and weight: lam == 0 gives S_ALS, lam > 0 gives S."""
    if lam == 0:
        return lambda x: als_sweep(t, x, pinv_threshold)
    return lambda x: rals_sweep(t, x, lam, pinv_threshold)
