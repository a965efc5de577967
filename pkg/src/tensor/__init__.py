"""Tensor storage, CP algebra, problem generation and file I/O."""

from src.tensor.core import (
    FactorSet,
    Tensor3,
    cp_reconstruct,
    fold,
    gradient_f,
    gradient_norm,
    khatri_rao,
    matricize,
    mttkrp,
    residual_f,
)
from src.tensor.io import read_tensor, write_tensor
from src.tensor.problems import CPProblem, initial_guess, random_cp_problem

__all__ = [
    "CPProblem",
    "FactorSet",
    "Tensor3",
    "cp_reconstruct",
    "fold",
    "initial_guess",
    "gradient_f",
    "gradient_norm",
    "khatri_rao",
    "matricize",
    "mttkrp",
    "random_cp_problem",
    "read_tensor",
    "residual_f",
    "write_tensor",
]
