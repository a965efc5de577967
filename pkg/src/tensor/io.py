"""Tensor text format.

Line 1 holds "I J K"; the remaining whitespace-separated tokens are the
entries in canonical layout order (first index fastest), written with 17
significant digits so that a write/read cycle is bit-exact.
"""

from pathlib import Path
from typing import Union

import numpy as np

from src.tensor.core import Tensor3
from src.utils.errors import ShapeMismatchError

PathLike = Union[str, Path]


def write_tensor(t: Tensor3, path: PathLike) -> Path:
    """Write a tensor in the text format.

    Args:
        t: Tensor to write
        path: Destination file (parent directories are created)

    Returns:
        The written path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        f.write("{} {} {}\n".format(*t.dims))
        np.savetxt(f, t.values, fmt="%.17g")
    return path


def read_tensor(path: PathLike) -> Tensor3:
    """Read a tensor written by :func:`write_tensor` (or by hand)."""
    with open(path, 'r', encoding='utf-8') as f:
        header = f.readline().split()
        body = f.read().split()

    if len(header) != 3:
        raise ShapeMismatchError(f"{path}: first line must be 'I J K', got {' '.join(header)!r}")
    try:
        dims = tuple(int(h) for h in header)
        values = np.array([float(tok) for tok in body])
    except ValueError as e:
        raise ShapeMismatchError(f"{path}: {e}") from e
    return Tensor3.from_flat(dims, values)
