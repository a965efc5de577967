"""Convergence diagnostics: descent checks, rates, plateaus, spectral prediction."""

from src.diagnostics.descent import bound_profile, check_descent, check_stationarity, gradient_bound_profile
from src.diagnostics.rates import detect_swamp, estimate_rate
from src.diagnostics.spectral import contraction_radius, hessian_fd, predict_contraction
from src.diagnostics.summary import summarize

__all__ = [
    "bound_profile",
    "check_descent",
    "check_stationarity",
    "contraction_radius",
    "detect_swamp",
    "estimate_rate",
    "gradient_bound_profile",
    "hessian_fd",
    "predict_contraction",
    "summarize",
]
