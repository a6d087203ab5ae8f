"""Transverse-field Ising ring: Hamiltonian, ground and Gibbs states, and the
symmetry-reduced GQD evaluation used for phase-transition sweeps.

Energies are in units of J; B and T are reported as B/J and T/J with k_B = 1.
"""

from dataclasses import dataclass
from functools import reduce
from typing import List, NamedTuple, Optional, Sequence

import numpy as np
import structlog
from scipy.optimize import minimize_scalar

from .core.exceptions import ConfigurationError, DegenerateGroundStateError, MeasurementError
from .core.models import (
    HALF_PI,
    AngleSet,
    HamiltonianSpec,
    IsingSweepConfig,
    OptimizerConfig,
    SweepRecord,
    ThermalSpec,
)
from .measure import product_rotation, site_rotation
from .qstate import DensityMatrix, partial_trace, shannon_entropy, von_neumann_entropy


logger = structlog.get_logger(__name__)

GAP_TOLERANCE = 1e-10
TRANSLATION_TOLERANCE = 1e-8
DEFAULT_FIELD_GRID = np.linspace(0.05, 3.0, 60)

_PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])
_PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
_ID2 = np.eye(2)


def _site_operator(operator: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    # operator on `site`, identity elsewhere
    factors = [operator if j == site else _ID2 for j in range(n_sites)]
    return reduce(np.kron, factors)


def build_hamiltonian(spec: HamiltonianSpec) -> np.ndarray:
    """H = -J sum_i Z_i Z_i+1 + B sum_i X_i with site L+1 identified with site 1."""
    n = spec.L
    if n < 3:
        raise ConfigurationError(f"Ring needs L >= 3, got {n}", key="L")
    z_ops = [_site_operator(_PAULI_Z, j, n) for j in range(n)]
    hamiltonian = np.zeros((2 ** n, 2 ** n))
    for j in range(n):
        hamiltonian -= spec.J * z_ops[j] @ z_ops[(j + 1) % n]
        hamiltonian += spec.B * _site_operator(_PAULI_X, j, n)
    return hamiltonian


@dataclass
class GroundState:
    """Lowest eigenvector of H as a rank-one state, with its energy and spectral gap."""
    state: DensityMatrix
    energy: float
    gap: float


def ground_state(hamiltonian: np.ndarray) -> GroundState:
    energies, vectors = np.linalg.eigh(hamiltonian)
    gap = float(energies[1] - energies[0])
    if gap < GAP_TOLERANCE:
        raise DegenerateGroundStateError(
            f"Ground state is degenerate (gap {gap:.3e})", gap=gap)
    state = DensityMatrix.from_pure(vectors[:, 0])
    logger.debug("Ground state extracted", energy=float(energies[0]), gap=gap)
    return GroundState(state=state, energy=float(energies[0]), gap=gap)


def gibbs_state(hamiltonian: np.ndarray, thermal: ThermalSpec) -> DensityMatrix:
    """exp(-H/T) / Z through the spectral decomposition, shifted by the lowest energy."""
    if thermal.T <= 0:
        raise ConfigurationError(f"Gibbs state needs T > 0, got {thermal.T}", key="T")
    energies, vectors = np.linalg.eigh(hamiltonian)
    weights = np.exp(-(energies - energies.min()) / thermal.T)
    weights /= weights.sum()
    return DensityMatrix((vectors * weights) @ vectors.conj().T)


def thermal_state(spec: HamiltonianSpec, thermal: Optional[ThermalSpec] = None) -> DensityMatrix:
    """Ground state at T = 0, Gibbs state above."""
    thermal = thermal or ThermalSpec()
    hamiltonian = build_hamiltonian(spec)
    if thermal.T == 0:
        return ground_state(hamiltonian).state
    return gibbs_state(hamiltonian, thermal)


def energy(rho: DensityMatrix, hamiltonian: np.ndarray) -> float:
    return float(np.real(np.trace(rho.matrix @ hamiltonian)))


def transverse_magnetization(rho: DensityMatrix) -> float:
    """Site average of <sigma_x>."""
    values = [np.real(np.trace(partial_trace(rho, [j]).matrix @ _PAULI_X))
              for j in range(rho.n_qubits)]
    return float(np.mean(values))


def cyclic_shift(rho: DensityMatrix) -> DensityMatrix:
    """Translate the ring by one site: qubit j moves to j + 1 (mod L)."""
    n = rho.n_qubits
    order = [n - 1] + list(range(n - 1))
    tensor = rho.matrix.reshape((2,) * (2 * n))
    tensor = tensor.transpose(order + [q + n for q in order])
    return DensityMatrix(tensor.reshape(rho.dim, rho.dim), validate=False)


def translation_defect(rho: DensityMatrix) -> float:
    """Max-abs change of the matrix under one cyclic shift."""
    return float(np.max(np.abs(cyclic_shift(rho).matrix - rho.matrix)))


class FormulaEvaluator:
    """Loss of correlation written in terms of the rotated full state and per-site marginals.

    sum_j S(rho_j) - S(rho) is computed once. Each evaluation adds the Shannon entropy of
    diag(R^dagger rho R) and subtracts the site-wise outcome entropies.
    """

    def __init__(self, rho: DensityMatrix):
        self.rho = rho
        self.n_sites = rho.n_qubits
        self._sites = [partial_trace(rho, [j]).matrix for j in range(self.n_sites)]
        self.quantum_information = (sum(von_neumann_entropy(m) for m in self._sites)
                                    - von_neumann_entropy(rho))

    def __call__(self, angles: AngleSet) -> float:
        if angles.n_qubits != self.n_sites:
            raise MeasurementError(
                f"AngleSet has {angles.n_qubits} qubits, state has {self.n_sites}")
        rotation = product_rotation(angles)
        joint = np.real(np.diag(rotation.conj().T @ self.rho.matrix @ rotation))
        site_terms = 0.0
        for site, (theta, phi) in zip(self._sites, angles.pairs):
            r = site_rotation(theta, phi)
            site_terms += shannon_entropy(np.real(np.diag(r.conj().T @ site @ r)))
        return self.quantum_information + shannon_entropy(joint) - site_terms

    def symmetric(self, theta: float) -> float:
        return self(AngleSet.uniform(self.n_sites, theta))


def eval_gqd_formula(rho: DensityMatrix, angles: AngleSet) -> float:
    """Loss of correlation over the singleton partition at fixed angles."""
    return FormulaEvaluator(rho)(angles)


class SymmetricScan(NamedTuple):
    value: float
    theta_bar: float


def symmetric_gqd_scan(rho: DensityMatrix, grid_points: int = 181,
                       refine_tol: float = 1e-10) -> SymmetricScan:
    """Minimize the loss with every site at the same theta (phi = 0).

    A uniform scan over [0, pi/2] is refined by golden-section search when its best
    point is a strict interior minimum.
    """
    if grid_points < 3:
        raise ConfigurationError(f"grid_points must be at least 3, got {grid_points}",
                                 key="scan_points")
    defect = translation_defect(rho)
    if defect > TRANSLATION_TOLERANCE:
        logger.warning("State is not translation invariant", defect=defect)
    evaluator = FormulaEvaluator(rho)
    thetas = np.linspace(0.0, HALF_PI, grid_points)
    values = np.array([evaluator.symmetric(theta) for theta in thetas])
    best = int(np.argmin(values))
    value, theta_bar = float(values[best]), float(thetas[best])
    if 0 < best < grid_points - 1 and values[best] < values[best - 1] \
            and values[best] < values[best + 1]:
        refined = minimize_scalar(
            evaluator.symmetric,
            bracket=(thetas[best - 1], thetas[best], thetas[best + 1]),
            method="golden",
            tol=refine_tol,
        )
        if refined.fun < value:
            value, theta_bar = float(refined.fun), float(refined.x)
    return SymmetricScan(value, theta_bar)


def sweep(L: int, grid: Optional[Sequence[float]] = None, T: float = 0.0, J: float = 1.0,
          optimizer: Optional[OptimizerConfig] = None, threads: int = 1,
          ring_bonds: bool = False, spot_check: bool = True) -> List[SweepRecord]:
    """Field sweep of total GQD, nearest-neighbor sum and residual GQD over B/J."""
    from .sweeps.ising_ring import IsingRingSweep

    config = IsingSweepConfig(
        name=f"ising-L{L}-T{T:g}",
        grid=list(DEFAULT_FIELD_GRID if grid is None else grid),
        threads=threads,
        optimizer=optimizer or OptimizerConfig(),
        ring_bonds=ring_bonds,
        L=L,
        J=J,
        T=T,
        spot_check=spot_check,
    )
    return IsingRingSweep(config).run().records
