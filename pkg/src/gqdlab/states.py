"""State families: GHZ, W, their mixtures with white noise, and seeded random states."""

from typing import NamedTuple, Optional

import numpy as np
import structlog
from scipy.special import xlogy

from .core.exceptions import ConfigurationError
from .core.models import StateFamily, StateSpec
from .qstate import LN2, DensityMatrix


logger = structlog.get_logger(__name__)


def ghz_vector(n_qubits: int) -> np.ndarray:
    """(|0...0> + |1...1>) / sqrt(2)."""
    psi = np.zeros(2 ** n_qubits, dtype=complex)
    psi[0] = psi[-1] = 1 / np.sqrt(2)
    return psi


def w_vector(n_qubits: int) -> np.ndarray:
    """Equal superposition of the weight-one basis states."""
    psi = np.zeros(2 ** n_qubits, dtype=complex)
    for qubit in range(n_qubits):
        # qubit 0 is the most significant bit
        psi[1 << (n_qubits - 1 - qubit)] = 1 / np.sqrt(n_qubits)
    return psi


def white_noise_mixture(psi: np.ndarray, mu: float) -> DensityMatrix:
    """(1 - mu) I / 2^N + mu |psi><psi|."""
    dim = psi.shape[0]
    matrix = (1 - mu) * np.eye(dim) / dim + mu * np.outer(psi, psi.conj())
    return DensityMatrix(matrix)


def random_density(n_qubits: int, rank: Optional[int] = None, seed: int = 0) -> DensityMatrix:
    """Random state G G^dagger / tr(G G^dagger) from a complex Gaussian 2^n x rank matrix.

    rank defaults to the full dimension. The same seed always gives the same matrix.
    """
    if n_qubits < 1:
        raise ConfigurationError(f"n_qubits must be at least 1, got {n_qubits}", key="n")
    dim = 2 ** n_qubits
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise ConfigurationError(f"rank {rank} outside [1, {dim}]", key="rank")
    rng = np.random.default_rng(seed)
    gram = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    matrix = gram @ gram.conj().T
    return DensityMatrix(matrix / np.real(np.trace(matrix)))


def make_state(spec: StateSpec) -> DensityMatrix:
    """Build the DensityMatrix a StateSpec describes."""
    family = spec.family
    n = spec.n_qubits
    if family == StateFamily.GHZ:
        rho = DensityMatrix.from_pure(ghz_vector(n))
    elif family == StateFamily.W:
        rho = DensityMatrix.from_pure(w_vector(n))
    elif family == StateFamily.WERNER_GHZ:
        rho = white_noise_mixture(ghz_vector(n), spec.mu)
    elif family == StateFamily.MIXED_W:
        rho = white_noise_mixture(w_vector(n), spec.mu)
    elif family == StateFamily.RANDOM:
        rho = random_density(n, spec.rank, spec.seed)
    else:
        raise ConfigurationError(f"Unknown state family {family!r}", key="family")
    logger.debug("State built", state=spec.label())
    return rho


def _xlog2x(value: float) -> float:
    return float(xlogy(value, value) / LN2)


class WBrackets(NamedTuple):
    """Loss of correlation of a mixed W state with every qubit measured in the Z basis.

    total is the N-party term, pair is any two-qubit marginal's term.
    """
    total: float
    pair: float


def mixed_w_brackets(n_qubits: int, mu: float) -> WBrackets:
    if n_qubits < 2:
        raise ConfigurationError(f"N must be at least 2, got {n_qubits}", key="n")
    if not 0.0 <= mu <= 1.0:
        raise ConfigurationError(f"mu {mu} outside [0, 1]", key="mu")
    n = n_qubits
    x = (1 - mu) / 2 ** n
    total = ((n - 1) * _xlog2x(x)
             - n * _xlog2x(x + mu / n)
             + _xlog2x(x + mu))
    y = (1 - mu) / 4
    pair = (_xlog2x(y)
            + _xlog2x(y + 2 * mu / n)
            - 2 * _xlog2x(y + mu / n))
    return WBrackets(total, pair)


def mixed_w_residual_closed_form(n_qubits: int, mu: float) -> float:
    """Residual GQD of the mixed W state, as the published closed form prints it.

    The pairwise bracket enters with a plus sign, multiplied by N - 1.
    """
    brackets = mixed_w_brackets(n_qubits, mu)
    return brackets.total + (n_qubits - 1) * brackets.pair


def mixed_w_residual_fixed_basis(n_qubits: int, mu: float) -> float:
    """Residual of the mixed W state with all qubits measured in the computational basis.

    Equals total - (N - 1) * pair. Each bracket upper-bounds the corresponding
    minimized GQD, since theta = 0 is one admissible measurement.
    """
    brackets = mixed_w_brackets(n_qubits, mu)
    return brackets.total - (n_qubits - 1) * brackets.pair
