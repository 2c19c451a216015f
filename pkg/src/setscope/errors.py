"""Exception types shared across the package.

The CLI maps these onto exit codes: invalid input and size caps exit with 2,
numerical failures with 3, verification mismatches with 1.
"""


class SetscopeError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(SetscopeError):
    """A parameter is outside its allowed domain (bad sign, w, momentum, extent)."""


class CapacityError(SetscopeError):
    """A requested dense object exceeds the configured memory budget."""


class InsufficientSamplesError(SetscopeError):
    """Too few data points for the requested fit or classification."""


class NumericalFailureError(SetscopeError):
    """An eigensolver or fit failed to converge."""


class VerificationError(SetscopeError):
    """An oracle cross-check found a mismatch."""
