"""Exception types shared by the tensor, solver and bench layers."""


class RalsBenchError(Exception):
    """Base class for every error raised by this package."""


class ShapeMismatchError(RalsBenchError, ValueError):
    """Tensor or factor shapes are malformed or incompatible."""


class NumericalFailure(RalsBenchError, ArithmeticError):
    """NaN/Inf contamination or a linear system that could not be solved."""


class DegenerateInputError(RalsBenchError, ZeroDivisionError):
    """Input sequence has a vanishing second difference."""


class TraceError(RalsBenchError, ValueError):
    """A convergence trace lacks the data an analysis needs."""


class ConfigError(RalsBenchError, ValueError):
    """Experiment configuration is invalid or unreadable."""
