"""Exception hierarchy shared by all modules."""


class MRBError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(MRBError, ValueError):
    """Operands live in so(n) for different n, or arrays have the wrong shape."""


class InvalidIndexError(MRBError, ValueError):
    """Basis index pair outside ``1 <= r < s <= n``."""


class ValidationError(MRBError, ValueError):
    """Input fails a structural check (symmetry, orthogonality, finiteness)."""


class GenericityError(ValidationError):
    """Inertia matrix is not positive definite with distinct eigenvalues."""


class InvalidInputError(MRBError, ValueError):
    """Argument value is outside the operation's domain."""


class PreconditionError(MRBError, ValueError):
    """Operation precondition (e.g. a steady seed) is not met."""


class ResourceError(MRBError, RuntimeError):
    """A hard cap on degree or field count was exceeded."""

    def __init__(self, message: str, cap: str):
        super().__init__(message)
        self.cap = cap


class DivergenceError(MRBError, RuntimeError):
    """Integration produced a non-finite state."""

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time
