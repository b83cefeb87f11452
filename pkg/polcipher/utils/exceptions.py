"""
Custom exceptions for the polarization cipher library.
"""


class InvalidArgumentError(ValueError):
    """Raised when an argument is out of range, non-finite or malformed."""
    pass


class PolarizationDomainError(ValueError):
    """Raised when a Stokes vector is not fully polarized where it must be."""
    pass


class InternalConsistencyError(RuntimeError):
    """Raised when an algebraic identity that must hold is violated numerically."""
    pass


class CipherIntegrityError(RuntimeError):
    """Raised when a secret pattern yields a non-physical or non-invertible Mueller matrix."""
    pass


class ExperimentConfigError(ValueError):
    """Raised when an experiment configuration is invalid or inconsistent."""
    pass


class ResultWriteError(OSError):
    """Raised when a result artifact cannot be written."""
    pass
