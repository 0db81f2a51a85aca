"""Exception types shared across the package."""


class NsumkitError(Exception):
    """Base class for all package errors."""


class DomainError(NsumkitError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class DegenerateSampleError(NsumkitError):
    """A degree sample carries no information (all personal degrees zero)."""


class UnsupportedModelError(NsumkitError, ValueError):
    """The requested model/method combination has no defined result."""


class InfeasibleModelError(NsumkitError):
    """The model cannot be simulated at the requested size."""


class CalibrationError(NsumkitError):
    """An empirical calibration loop failed to reach its target band."""


class UsageError(NsumkitError, ValueError):
    """An operation was called in a way its contract forbids."""
