"""Exception types shared across the package."""


class VdcError(Exception):
    """Base class for all errors raised by vdcsets."""


class DomainError(VdcError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PrecisionError(VdcError, ArithmeticError):
    """The working precision cannot guarantee the requested accuracy.

    ``index`` is the first index (or digit position) that failed, when known.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class CapacityError(VdcError):
    """A configured size budget (sieve bound, grid size, ...) was exceeded."""


class EmptySetError(VdcError):
    """A set enumeration produced no admissible elements."""
