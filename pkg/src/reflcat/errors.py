"""Exception types shared across the package."""


class ReflcatError(Exception):
    pass


class DomainError(ReflcatError, ValueError):
    """Input outside the mathematical domain of an operation."""


class StructuralError(ReflcatError, ValueError):
    """Malformed input: wrong shapes, asymmetric Gram matrix, bad JSON."""


class ResourceError(ReflcatError, RuntimeError):
    """A computation would exceed its memory or size budget."""

    def __init__(self, msg, estimate=None):
        super().__init__(msg)
        self.estimate = estimate


class UnsupportedError(ReflcatError, NotImplementedError):
    """The requested method does not apply to this input."""


class InvariantViolation(ReflcatError, AssertionError):
    """An internal consistency check failed."""
