"""Exception hierarchy shared by every module."""


class SecantProjError(Exception):
    """Base class for all errors raised by secantproj."""


class InvalidArgumentError(SecantProjError, ValueError):
    """An argument is outside its documented domain."""


class EmptySecantSetError(SecantProjError, ValueError):
    """Every candidate secant was dropped during construction."""


class MemoryBudgetError(SecantProjError, MemoryError):
    """A secant matrix would exceed the configured memory budget."""


class NumericalFailureError(SecantProjError, ArithmeticError):
    """A numerical kernel failed to produce a trustworthy result."""


class RankDeficiencyError(NumericalFailureError):
    """Gram-Schmidt met a vector (nearly) inside the span of its predecessors.

    ``position`` is 1-based, counting from the first input vector.
    """

    def __init__(self, position, residual):
        self.position = position
        self.residual = residual
        super().__init__(
            f"linearly dependent input at position {position} "
            f"(residual norm {residual:.3e})"
        )


class DataFormatError(SecantProjError, ValueError):
    """A file could not be parsed; the message names the location."""


class SchemaVersionError(DataFormatError):
    """A results document carries an unsupported schema_version."""
