"""RALS benchmark toolkit.

CP approximation of third-order tensors with ALS, regularized (proximal) ALS
and matrix Aitken-Steffensen acceleration, plus convergence diagnostics and
a reproducible experiment harness.
"""

__version__ = "0.1.0"
__author__ = "ralsbench contributors"
