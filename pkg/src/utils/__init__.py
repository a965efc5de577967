"""Shared helpers: error types and logging setup."""

from src.utils.errors import (
    ConfigError,
    DegenerateInputError,
    NumericalFailure,
    RalsBenchError,
    ShapeMismatchError,
    TraceError,
)
from src.utils.log import setup_logging

__all__ = [
    "ConfigError",
    "DegenerateInputError",
    "NumericalFailure",
    "RalsBenchError",
    "ShapeMismatchError",
    "TraceError",
    "setup_logging",
]
