"""Sweeps package initialization."""

from ..core.base import BaseSweep
from .ising_ring import IsingRingSweep
from .mixture import MixtureSweep

__all__ = [
    "BaseSweep",
    "IsingRingSweep",
    "MixtureSweep",
]
