"""Dense third-order tensors, CP factor sets and the residual objective.

Canonical layout: entries are enumerated first index fastest, then second,
then third (Fortran order). Mode-n matricizations use the same fiber order,
so ``matricize(t, 1)`` is a view of the canonical buffer and the columns of
``T(1)`` are t[:,0,0], t[:,1,0], ..., t[:,J-1,0], t[:,0,1], ...
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Tuple

import numpy as np

from src.utils.errors import ShapeMismatchError

Dims = Tuple[int, int, int]

MODES = (1, 2, 3)

# Axis order that brings the preserved index first; the remaining two keep
# their relative order so that a Fortran reshape reproduces the fiber order.
_MODE_AXES = {1: (0, 1, 2), 2: (1, 0, 2), 3: (2, 0, 1)}


def _check_dims(dims: Sequence[int]) -> Dims:
    if len(dims) != 3 or any(int(d) != d or d < 1 for d in dims):
        raise ShapeMismatchError(f"dims must be three positive integers, got {tuple(dims)}")
    return tuple(int(d) for d in dims)


def _check_mode(mode: int) -> int:
    if mode not in MODES:
        raise ShapeMismatchError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


def _frozen(array: np.ndarray, order: str = "C") -> np.ndarray:
    out = np.array(array, dtype=float, order=order, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class Tensor3:
    """Dense real I x J x K tensor.

    Attributes:
        data: Read-only (I, J, K) array stored in Fortran (canonical) order
    """

    data: np.ndarray

    def __post_init__(self):
        if np.ndim(self.data) != 3:
            raise ShapeMismatchError(f"expected a 3-way array, got ndim={np.ndim(self.data)}")
        _check_dims(np.shape(self.data))
        object.__setattr__(self, "data", _frozen(self.data, order="F"))

    @classmethod
    def from_flat(cls, dims: Sequence[int], values: Sequence[float]) -> "Tensor3":
        """Build a tensor from entries listed in canonical layout order."""
        dims = _check_dims(dims)
        values = np.asarray(values, dtype=float).ravel()
        if values.size != dims[0] * dims[1] * dims[2]:
            raise ShapeMismatchError(
                f"expected {dims[0] * dims[1] * dims[2]} values for dims {dims}, got {values.size}"
            )
        return cls(values.reshape(dims, order="F"))

    @classmethod
    def zeros(cls, dims: Sequence[int]) -> "Tensor3":
        return cls(np.zeros(_check_dims(dims)))

    @property
    def dims(self) -> Dims:
        return tuple(self.data.shape)

    @property
    def values(self) -> np.ndarray:
        """Entries as a flat vector in canonical layout."""
        return self.data.ravel(order="F")

    def norm(self) -> float:
        """Frobenius norm."""
        return float(np.linalg.norm(self.data))

    @cached_property
    def unfoldings(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """The three matricizations, computed once per tensor."""
        return tuple(matricize(self, m) for m in MODES)


@dataclass(frozen=True, eq=False)
class FactorSet:
    """CP factor matrices A (I x r), B (J x r), C (K x r).

    The same data can be viewed as the stacked (I+J+K) x r matrix
    X = [A; B; C] or as the row-major flattening of X, whose first I*r
    entries are A, then B, then C.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        blocks = [np.asarray(m, dtype=float) for m in (self.A, self.B, self.C)]
        if any(m.ndim != 2 for m in blocks):
            raise ShapeMismatchError("factor matrices must be 2-D")
        widths = {m.shape[1] for m in blocks}
        if len(widths) != 1:
            raise ShapeMismatchError(f"factor column counts differ: {[m.shape[1] for m in blocks]}")
        if blocks[0].shape[1] < 1 or any(m.shape[0] < 1 for m in blocks):
            raise ShapeMismatchError("factor matrices must be non-empty")
        for name, m in zip("ABC", blocks):
            object.__setattr__(self, name, _frozen(m))

    @property
    def r(self) -> int:
        return self.A.shape[1]

    @property
    def dims(self) -> Dims:
        return (self.A.shape[0], self.B.shape[0], self.C.shape[0])

    @property
    def blocks(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.A, self.B, self.C)

    @property
    def stacked(self) -> np.ndarray:
        """X = [A; B; C], shape (I+J+K) x r."""
        return np.vstack(self.blocks)

    @property
    def flat(self) -> np.ndarray:
        """Row-major flattening of X, length r(I+J+K)."""
        return self.stacked.ravel()

    @classmethod
    def from_stacked(cls, x: np.ndarray, dims: Sequence[int]) -> "FactorSet":
        I, J, K = _check_dims(dims)
        x = np.asarray(x, dtype=float)
        if x.ndim != 2 or x.shape[0] != I + J + K:
            raise ShapeMismatchError(f"stacked matrix of shape {x.shape} does not match dims {(I, J, K)}")
        return cls(x[:I], x[I:I + J], x[I + J:])

    @classmethod
    def from_flat(cls, vec: np.ndarray, dims: Sequence[int], r: int) -> "FactorSet":
        I, J, K = _check_dims(dims)
        vec = np.asarray(vec, dtype=float).ravel()
        if vec.size != r * (I + J + K):
            raise ShapeMismatchError(f"flat vector of length {vec.size} does not match r={r}, dims={(I, J, K)}")
        return cls.from_stacked(vec.reshape(I + J + K, r), (I, J, K))

    def is_finite(self) -> bool:
        return all(np.isfinite(m).all() for m in self.blocks)

    def distance_sq(self, other: "FactorSet") -> float:
        """||X_self - X_other||_F^2, summed block by block."""
        return float(sum(np.sum((a - b) ** 2) for a, b in zip(self.blocks, other.blocks)))


def _check_compatible(t: Tensor3, f: FactorSet) -> None:
    if t.dims != f.dims:
        raise ShapeMismatchError(f"factor dims {f.dims} do not match tensor dims {t.dims}")


def matricize(t: Tensor3, m: int) -> np.ndarray:
    """Mode-m matricization.

    Args:
        t: Tensor to unfold
        m: Preserved mode (1, 2 or 3)

    Returns:
        T(1) of shape I x JK, T(2) of shape J x IK or T(3) of shape K x IJ
    """
    _check_mode(m)
    moved = np.transpose(t.data, _MODE_AXES[m])
    return moved.reshape(moved.shape[0], -1, order="F")


def fold(matrix: np.ndarray, mode: int, dims: Sequence[int]) -> Tensor3:
    """Inverse of :func:`matricize`."""
    _check_mode(mode)
    dims = _check_dims(dims)
    axes = _MODE_AXES[mode]
    moved_shape = tuple(dims[a] for a in axes)
    matrix = np.asarray(matrix, dtype=float)
    expected = (moved_shape[0], moved_shape[1] * moved_shape[2])
    if matrix.shape != expected:
        raise ShapeMismatchError(f"mode-{mode} matrix must have shape {expected}, got {matrix.shape}")
    moved = matrix.reshape(moved_shape, order="F")
    return Tensor3(np.transpose(moved, np.argsort(axes)))


def khatri_rao(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Column-wise Kronecker product: column s is kron(p[:, s], q[:, s])."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.ndim != 2 or q.ndim != 2 or p.shape[1] != q.shape[1]:
        raise ShapeMismatchError(f"Khatri-Rao needs equal column counts, got {p.shape} and {q.shape}")
    return (p[:, None, :] * q[None, :, :]).reshape(p.shape[0] * q.shape[0], p.shape[1])


def cp_reconstruct(f: FactorSet, dims: Sequence[int]) -> Tensor3:
    """Sum of rank-one terms a_s o b_s o c_s."""
    if _check_dims(dims) != f.dims:
        raise ShapeMismatchError(f"factor dims {f.dims} do not match requested dims {tuple(dims)}")
    return Tensor3(np.einsum("ir,jr,kr->ijk", f.A, f.B, f.C))


def mttkrp(t: Tensor3, f: FactorSet, mode: int) -> np.ndarray:
    """T(m) times the Khatri-Rao product of the other two factors.

    Equals T(1)(C kr B), T(2)(C kr A) or T(3)(B kr A) without forming the
    Khatri-Rao matrix.
    """
    _check_compatible(t, f)
    _check_mode(mode)
    if mode == 1:
        return np.einsum("ijk,jr,kr->ir", t.data, f.B, f.C)
    if mode == 2:
        return np.einsum("ijk,ir,kr->jr", t.data, f.A, f.C)
    return np.einsum("ijk,ir,jr->kr", t.data, f.A, f.B)


def residual_f(t: Tensor3, f: FactorSet) -> float:
    """f = 1/2 ||T - sum_s a_s o b_s o c_s||_F^2."""
    _check_compatible(t, f)
    diff = t.data - np.einsum("ir,jr,kr->ijk", f.A, f.B, f.C)
    return 0.5 * float(np.sum(diff * diff))


def gradient_f(t: Tensor3, f: FactorSet) -> FactorSet:
    """Analytic gradient (grad_A f, grad_B f, grad_C f).

    grad_A f = (A (C kr B)^T - T(1)) (C kr B) = A ((C^T C) * (B^T B)) - T(1)(C kr B),
    and cyclically for B and C.
    """
    _check_compatible(t, f)
    gram_a, gram_b, gram_c = (m.T @ m for m in f.blocks)
    grad_a = f.A @ (gram_c * gram_b) - mttkrp(t, f, 1)
    grad_b = f.B @ (gram_c * gram_a) - mttkrp(t, f, 2)
    grad_c = f.C @ (gram_b * gram_a) - mttkrp(t, f, 3)
    return FactorSet(grad_a, grad_b, grad_c)


def gradient_norm(t: Tensor3, f: FactorSet) -> float:
    """Euclidean norm of the flat gradient."""
    return float(np.linalg.norm(gradient_f(t, f).flat))
