"""Exception types shared across the package."""


class MmesError(Exception):
    """Base class for all package errors."""


class DomainError(MmesError, ValueError):
    """An argument violates a precondition (range, shape, count)."""


class ResourceError(MmesError):
    """The request exceeds a configured resource limit."""


class ValidationError(MmesError, ValueError):
    """A supplied object fails a structural check (e.g. a non-unitary matrix)."""


class FormatError(MmesError, ValueError):
    """Serialized data is malformed or inconsistent."""


class DegenerateWeightsError(MmesError, RuntimeError):
    """Importance weights are too concentrated to be usable."""


class NumericalError(MmesError, ArithmeticError):
    """A computation produced a non-finite value and cannot continue."""
