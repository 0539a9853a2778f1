"""Exception hierarchy.

Every error raised by the library derives from :class:`FrustrataError`. The
CLI maps :class:`CapacityError` to exit code 3 and the remaining
``ValueError`` subclasses to exit code 1.
"""


class FrustrataError(Exception):
    pass


class ParameterError(FrustrataError, ValueError):
    """Invalid numeric parameter or degenerate geometry."""


class LatticeRangeError(FrustrataError, IndexError):
    """A site, bond or trail falls outside the coupling window."""


class DomainError(FrustrataError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class CapacityError(FrustrataError, RuntimeError):
    """Exact computation exceeds a configured size cap."""

    def __init__(self, message: str, cap_name: str = "", cap: int | None = None):
        super().__init__(message)
        self.cap_name = cap_name
        self.cap = cap


class ConcatenationError(FrustrataError, ValueError):
    """Joined walk is not a trail (endpoint mismatch or a reused segment)."""


class NotEulerianError(FrustrataError, ValueError):
    pass


class ColoringError(FrustrataError, ValueError):
    """Curve has a vertex of odd order, so its complement cannot be two-colored."""


class PreconditionError(FrustrataError, ValueError):
    pass
