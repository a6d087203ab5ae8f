"""Core package initialization."""

from .config import Settings, get_settings
from .exceptions import (
    ConfigurationError,
    DegenerateGroundStateError,
    ExportError,
    GqdLabError,
    MeasurementError,
    OptimizerError,
    PartitionError,
    StateValidationError,
)
from .models import (
    AngleSet,
    AuditReport,
    AuditSpec,
    GqdResult,
    HamiltonianSpec,
    OptimizerConfig,
    Partition,
    QubitSubset,
    StateFamily,
    StateSpec,
    SweepRecord,
    SweepResult,
    ThermalSpec,
)

__all__ = [
    "Settings",
    "get_settings",
    "GqdLabError",
    "StateValidationError",
    "PartitionError",
    "MeasurementError",
    "OptimizerError",
    "DegenerateGroundStateError",
    "ConfigurationError",
    "ExportError",
    "AngleSet",
    "AuditReport",
    "AuditSpec",
    "GqdResult",
    "HamiltonianSpec",
    "OptimizerConfig",
    "Partition",
    "QubitSubset",
    "StateFamily",
    "StateSpec",
    "SweepRecord",
    "SweepResult",
    "ThermalSpec",
]
