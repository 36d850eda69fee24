"""Exception types shared across the package."""


class MatBetaError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(MatBetaError, ValueError):
    """Operands are not square or their shapes do not match."""


class DomainError(MatBetaError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class RangeError(MatBetaError, ArithmeticError):
    """The exact result is not representable in double precision."""


class DecompositionError(MatBetaError, ArithmeticError):
    """An eigenvalue or singular value computation failed to converge."""


class EvaluationError(MatBetaError, ArithmeticError):
    """A numerical evaluation produced NaN or could not be completed."""
