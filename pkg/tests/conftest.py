"""Test configuration and fixtures."""

import numpy as np
import pytest

from gqdlab.core.models import OptimizerConfig, StateFamily, StateSpec
from gqdlab.qstate import DensityMatrix
from gqdlab.states import make_state


@pytest.fixture
def fast_optimizer():
    """Optimizer settings small enough for unit tests."""
    return OptimizerConfig(
        restarts=4,
        grid_seeds_per_angle=2,
        max_iterations=1500,
        seed=7,
    )


@pytest.fixture
def rng():
    """Seeded generator for random angles and states."""
    return np.random.default_rng(1234)


@pytest.fixture
def ghz():
    """Factory for pure GHZ states."""
    def build(n_qubits: int) -> DensityMatrix:
        return make_state(StateSpec(family=StateFamily.GHZ, n_qubits=n_qubits))
    return build


@pytest.fixture
def bell_state():
    """(|00> + |11>) / sqrt(2)."""
    return DensityMatrix.from_pure(np.array([1, 0, 0, 1]) / np.sqrt(2))


@pytest.fixture
def product_state():
    """Three-qubit product of distinct mixed single-qubit states."""
    factors = [
        np.array([[0.7, 0.2], [0.2, 0.3]]),
        np.array([[0.5, 0.1j], [-0.1j, 0.5]]),
        np.array([[0.9, 0.0], [0.0, 0.1]]),
    ]
    return DensityMatrix(np.kron(np.kron(factors[0], factors[1]), factors[2]))
