"""Matrix-parameter beta-family special functions."""

from .errors import (
    DecompositionError,
    DimensionError,
    DomainError,
    EvaluationError,
    MatBetaError,
    RangeError,
)

__version__ = "0.1.0"
