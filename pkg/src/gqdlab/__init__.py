"""gqdlab: global quantum discord of multi-qubit states, its monogamy relations and
transverse-field Ising sweeps."""

__version__ = "0.1.0"

from .core.models import AngleSet, OptimizerConfig, Partition, StateFamily, StateSpec
from .qstate import DensityMatrix, partial_trace, von_neumann_entropy
from .discord import gqd, loss_of_correlation, mutual_information
from .states import make_state, random_density

__all__ = [
    "AngleSet",
    "OptimizerConfig",
    "Partition",
    "StateFamily",
    "StateSpec",
    "DensityMatrix",
    "partial_trace",
    "von_neumann_entropy",
    "gqd",
    "loss_of_correlation",
    "mutual_information",
    "make_state",
    "random_density",
]
