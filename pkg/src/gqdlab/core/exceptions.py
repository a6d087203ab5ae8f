"""Custom exceptions for the gqdlab toolkit."""

from typing import Optional


class GqdLabError(Exception):
    """Base exception for all gqdlab errors."""
    pass


class StateValidationError(GqdLabError):
    """Exception raised when a matrix is not a valid density matrix."""
    pass


class PartitionError(GqdLabError):
    """Exception raised for empty, overlapping or out-of-range qubit subsets."""
    pass


class MeasurementError(GqdLabError):
    """Exception raised when measurement angles do not match the register."""
    pass


class OptimizerError(GqdLabError):
    """Exception raised when the discord objective cannot be evaluated."""
    pass


class DegenerateGroundStateError(GqdLabError):
    """Exception raised when the ground state is not separated by a spectral gap."""

    def __init__(self, message: str, gap: float):
        super().__init__(message)
        self.gap = gap


class ConfigurationError(GqdLabError):
    """Exception raised when configuration is invalid."""

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(message)
        self.key = key


class ExportError(GqdLabError):
    """Exception raised when export operations fail."""
    pass
