"""Multipartite mutual information, loss of correlation and global quantum discord."""

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy.optimize import minimize

from .core.exceptions import MeasurementError, OptimizerError, PartitionError
from .core.models import (
    HALF_PI,
    AngleSet,
    GqdResult,
    MonotonicityReport,
    OptimizerConfig,
    Partition,
)
from .measure import rotated_diagonal, rotations_from_vector
from .qstate import DensityMatrix, matrix_entropy, reduce_matrix, shannon_entropy


logger = structlog.get_logger(__name__)

# Added to every inequality tolerance; each side carries its own optimization error.
OPTIMIZER_NOISE_BUDGET = 1e-6


def _block_information(matrix: np.ndarray, n_qubits: int,
                       blocks: Sequence[Tuple[int, ...]]) -> float:
    return (sum(matrix_entropy(reduce_matrix(matrix, n_qubits, block)) for block in blocks)
            - matrix_entropy(matrix))


class CorrelationLoss:
    """I(rho) - I(Phi(rho)) over one partition, as a function of flattened angles.

    The state is reduced to the partition's union once. Angle vectors are
    (theta, phi) pairs over the union in register order. Instances are
    read-only after construction and safe to call from several threads.
    """

    def __init__(self, rho: DensityMatrix, partition: Partition):
        partition.check_register(rho.n_qubits)
        partition.require_correlation()
        self.partition = partition
        self.n_register = rho.n_qubits
        self.qubits = partition.union
        size = len(self.qubits)
        self._matrix = reduce_matrix(rho.matrix, rho.n_qubits, self.qubits)
        position = {qubit: i for i, qubit in enumerate(self.qubits)}
        self._blocks = [tuple(position[q] for q in block.indices) for block in partition.blocks]
        self._traced_axes = [tuple(i for i in range(size) if i not in block)
                             for block in self._blocks]
        self._shape = (2,) * size
        self.quantum_information = _block_information(self._matrix, size, self._blocks)

    @property
    def n_angles(self) -> int:
        return 2 * len(self.qubits)

    def classical_information(self, rotations: np.ndarray) -> float:
        """Mutual information of the product-measurement outcomes."""
        joint = rotated_diagonal(self._matrix, rotations).reshape(self._shape)
        marginals = sum(shannon_entropy(joint.sum(axis=axes)) for axes in self._traced_axes)
        return marginals - shannon_entropy(joint)

    def __call__(self, vector: np.ndarray) -> float:
        value = self.quantum_information - self.classical_information(rotations_from_vector(vector))
        if not math.isfinite(value):
            raise OptimizerError(f"Non-finite loss of correlation at {list(vector)}")
        return value

    def vector_for(self, angles: AngleSet) -> np.ndarray:
        """Flatten a register-length AngleSet onto this objective's qubits."""
        if angles.n_qubits != self.n_register:
            raise MeasurementError(
                f"AngleSet has {angles.n_qubits} qubits, register has {self.n_register}")
        return angles.restrict(self.qubits).to_vector()

    def at(self, angles: AngleSet) -> float:
        return self(self.vector_for(angles))


def mutual_information(rho: DensityMatrix, partition: Partition) -> float:
    """Sum of block entropies minus the entropy of the blocks' union."""
    partition.check_register(rho.n_qubits)
    partition.require_correlation()
    qubits = partition.union
    position = {qubit: i for i, qubit in enumerate(qubits)}
    blocks = [tuple(position[q] for q in block.indices) for block in partition.blocks]
    matrix = reduce_matrix(rho.matrix, rho.n_qubits, qubits)
    return _block_information(matrix, len(qubits), blocks)


def loss_of_correlation(rho: DensityMatrix, partition: Partition, angles: AngleSet) -> float:
    """D_Phi = I(rho) - I(Phi(rho)) for a fixed register-length AngleSet."""
    return CorrelationLoss(rho, partition).at(angles)


def start_points(n_sites: int, cfg: OptimizerConfig,
                 warm_starts: Sequence[np.ndarray] = ()) -> List[np.ndarray]:
    """Zero corner, stratified seeds, seeded random starts, then warm starts.

    The stratified seeds form a theta x phi product grid with every site at the
    same cell centre, theta varying slowest.
    """
    starts = [np.zeros(2 * n_sites)]
    seeds = cfg.grid_seeds_per_angle
    centres = [(i + 0.5) / seeds for i in range(seeds)]
    for theta_frac, phi_frac in itertools.product(centres, centres):
        starts.append(np.tile([theta_frac * HALF_PI, phi_frac * math.pi], n_sites))
    rng = np.random.default_rng(cfg.seed)
    for _ in range(max(cfg.restarts - 2, 0)):
        thetas = rng.uniform(0.0, HALF_PI, n_sites)
        phis = rng.uniform(0.0, math.pi, n_sites)
        starts.append(np.column_stack([thetas, phis]).ravel())
    starts.extend(np.asarray(w, dtype=float) for w in warm_starts)
    return starts


@dataclass
class _SearchOutcome:
    start: int
    value: float
    vector: np.ndarray
    evaluations: int
    success: bool


def _local_search(objective: CorrelationLoss, start: int, x0: np.ndarray,
                  cfg: OptimizerConfig) -> _SearchOutcome:
    best_value = math.inf
    best_vector = x0
    evaluations = 0

    def tracked(x: np.ndarray) -> float:
        nonlocal best_value, best_vector, evaluations
        value = objective(x)
        evaluations += 1
        if value < best_value:
            best_value = value
            best_vector = np.array(x, copy=True)
        return value

    simplex = np.vstack([x0] + [x0 + cfg.initial_step * unit for unit in np.eye(len(x0))])
    result = minimize(
        tracked,
        x0,
        method="Nelder-Mead",
        options={
            "maxiter": cfg.max_iterations,
            "xatol": cfg.x_tol,
            "fatol": cfg.f_tol,
            "initial_simplex": simplex,
        },
    )
    return _SearchOutcome(start, best_value, best_vector, evaluations, bool(result.success))


def gqd(rho: DensityMatrix, partition: Partition, cfg: Optional[OptimizerConfig] = None,
        warm_starts: Sequence[AngleSet] = ()) -> GqdResult:
    """Global quantum discord: minimum of the loss of correlation over product measurements.

    Every evaluated point counts towards the minimum, so the result never
    exceeds the loss at any evaluated AngleSet (the zero corner included).
    """
    cfg = cfg or OptimizerConfig()
    objective = CorrelationLoss(rho, partition)
    starts = start_points(len(objective.qubits), cfg,
                          [objective.vector_for(w) for w in warm_starts])

    def run(indexed: Tuple[int, np.ndarray]) -> _SearchOutcome:
        return _local_search(objective, indexed[0], indexed[1], cfg)

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            outcomes = list(pool.map(run, enumerate(starts)))
    else:
        outcomes = [run(item) for item in enumerate(starts)]

    best = min(outcomes, key=lambda o: (o.value, o.start))
    evaluations = sum(o.evaluations for o in outcomes)
    argmin = AngleSet.embed(rho.n_qubits, objective.qubits, AngleSet.from_vector(best.vector))
    result = GqdResult(
        value=best.value,
        argmin=argmin,
        evaluations=evaluations,
        converged=best.success,
        starts=len(starts),
        best_start=best.start,
        partition=partition,
    )
    log = logger.bind(partition=partition.label())
    if not result.converged:
        log.warning("Local search hit its iteration limit", value=result.value,
                    best_start=best.start)
    log.debug("GQD minimized", value=result.value, evaluations=evaluations,
              starts=len(starts))
    return result


class GridMinimum(NamedTuple):
    value: float
    argmin: AngleSet


def grid_minimum(rho: DensityMatrix, partition: Partition,
                 points_per_angle: int = 8) -> GridMinimum:
    """Brute-force minimum of the loss over a product grid of site angles.

    theta runs over [0, pi/2] inclusive and phi over [0, pi) exclusive. The
    cost grows as points_per_angle^(2m) for m measured qubits.
    """
    objective = CorrelationLoss(rho, partition)
    thetas = np.linspace(0.0, HALF_PI, points_per_angle)
    phis = np.linspace(0.0, math.pi, points_per_angle, endpoint=False)
    site_pairs = [(theta, phi) for theta in thetas for phi in phis]
    best_value = math.inf
    best_vector = np.zeros(objective.n_angles)
    for combo in itertools.product(site_pairs, repeat=len(objective.qubits)):
        vector = np.array([value for pair in combo for value in pair])
        value = objective(vector)
        if value < best_value:
            best_value = value
            best_vector = vector
    argmin = AngleSet.embed(rho.n_qubits, objective.qubits, AngleSet.from_vector(best_vector))
    return GridMinimum(best_value, argmin)


def monotonicity_condition_audit(rho: DensityMatrix, order: Partition,
                                 cfg: Optional[OptimizerConfig] = None,
                                 tolerance: float = 0.0) -> MonotonicityReport:
    """Check D(A_1..A_k : A_k+1) >= D(A_1 : A_k+1) along the party order."""
    if len(order.blocks) < 3 or not order.is_singleton:
        raise PartitionError("Monotonicity audit needs at least three singleton parties")
    order.check_register(rho.n_qubits)
    parties = [block.indices[0] for block in order.blocks]
    tol = tolerance + OPTIMIZER_NOISE_BUDGET
    grouped: List[float] = []
    pairwise: List[float] = []
    for k in range(1, len(parties)):
        pair = gqd(rho, Partition.of([[parties[0]], [parties[k]]]), cfg).value
        if k == 1:
            group = pair
        else:
            group = gqd(rho, Partition.of([parties[:k], [parties[k]]]), cfg).value
        grouped.append(group)
        pairwise.append(pair)
    margins = [g - p for g, p in zip(grouped, pairwise)]
    holds = all(m >= -tol for m in margins)
    logger.debug("Monotonicity audit", margins=margins, condition_holds=holds)
    return MonotonicityReport(margins=margins, grouped=grouped, pairwise=pairwise,
                              tolerance=tol, condition_holds=holds)
