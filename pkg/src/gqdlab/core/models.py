"""Core data models for measurements, partitions, audits, sweeps and run configuration."""

import math
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, ClassVar, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from .exceptions import ConfigurationError, PartitionError


HALF_PI = math.pi / 2


def normalize_angle_pair(theta: float, phi: float) -> Tuple[float, float]:
    """Map (theta, phi) into theta in [0, pi/2], phi in [0, pi).

    The unordered projector pair is unchanged by theta -> theta + pi/2 (the two
    projectors swap), by theta -> theta + pi (global sign) and by
    (theta, phi + pi) -> (pi/2 - theta, phi).
    """
    if not (math.isfinite(theta) and math.isfinite(phi)):
        raise ValueError("measurement angles must be finite")
    theta = math.fmod(theta, math.pi)
    if theta < 0:
        theta += math.pi
    if theta >= HALF_PI:
        theta -= HALF_PI
    phi = math.fmod(phi, 2 * math.pi)
    if phi < 0:
        phi += 2 * math.pi
    while phi >= math.pi:
        phi -= math.pi
        theta = HALF_PI - theta
    return min(max(theta, 0.0), HALF_PI), phi


def party_label(indices: Sequence[int]) -> str:
    """1-based party label of a group of qubits, e.g. (0, 1) -> 'A1A2'."""
    return "".join(f"A{i + 1}" for i in indices)


class AngleSet(BaseModel):
    """Per-qubit measurement angles (theta_j, phi_j) of a product rotation."""

    model_config = ConfigDict(frozen=True)

    pairs: Tuple[Tuple[float, float], ...]

    @field_validator("pairs")
    @classmethod
    def _normalize(cls, value: Tuple[Tuple[float, float], ...]) -> Tuple[Tuple[float, float], ...]:
        return tuple(normalize_angle_pair(theta, phi) for theta, phi in value)

    @classmethod
    def zeros(cls, n_qubits: int) -> "AngleSet":
        return cls(pairs=[(0.0, 0.0)] * n_qubits)

    @classmethod
    def uniform(cls, n_qubits: int, theta: float, phi: float = 0.0) -> "AngleSet":
        """Same angles on every qubit."""
        return cls(pairs=[(theta, phi)] * n_qubits)

    @classmethod
    def from_vector(cls, vector: Sequence[float]) -> "AngleSet":
        """Build from a flat (theta_0, phi_0, theta_1, phi_1, ...) vector."""
        values = [float(v) for v in vector]
        if len(values) % 2:
            raise ValueError("angle vector must have even length")
        return cls(pairs=list(zip(values[0::2], values[1::2])))

    @classmethod
    def embed(cls, n_qubits: int, qubits: Sequence[int], sub: "AngleSet") -> "AngleSet":
        """Register-length AngleSet carrying `sub` on `qubits` and (0, 0) elsewhere."""
        pairs = [(0.0, 0.0)] * n_qubits
        for qubit, pair in zip(qubits, sub.pairs):
            pairs[qubit] = pair
        return cls(pairs=pairs)

    @property
    def n_qubits(self) -> int:
        return len(self.pairs)

    @property
    def thetas(self) -> List[float]:
        return [theta for theta, _ in self.pairs]

    @property
    def phis(self) -> List[float]:
        return [phi for _, phi in self.pairs]

    def to_vector(self) -> np.ndarray:
        return np.array([value for pair in self.pairs for value in pair], dtype=float)

    def restrict(self, qubits: Sequence[int]) -> "AngleSet":
        return AngleSet(pairs=[self.pairs[q] for q in qubits])


class QubitSubset(BaseModel):
    """Distinct qubit positions, kept in increasing order."""

    model_config = ConfigDict(frozen=True)

    indices: Tuple[int, ...]

    @field_validator("indices")
    @classmethod
    def _normalize(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if not value:
            raise ValueError("qubit subset must be nonempty")
        if min(value) < 0:
            raise ValueError("qubit indices must be nonnegative")
        if len(set(value)) != len(value):
            raise ValueError("qubit indices must be distinct")
        return tuple(sorted(value))

    @classmethod
    def of(cls, indices: Sequence[int]) -> "QubitSubset":
        try:
            return cls(indices=tuple(indices))
        except ValidationError as e:
            raise PartitionError(f"Invalid qubit subset {list(indices)}: {e.errors()[0]['msg']}")


class Partition(BaseModel):
    """Ordered list of disjoint, nonempty blocks of qubits (the parties)."""

    model_config = ConfigDict(frozen=True)

    blocks: Tuple[QubitSubset, ...]

    @model_validator(mode="after")
    def _check_disjoint(self) -> "Partition":
        if not self.blocks:
            raise ValueError("partition needs at least one block")
        seen: set = set()
        for block in self.blocks:
            overlap = seen.intersection(block.indices)
            if overlap:
                raise ValueError(f"blocks overlap on qubits {sorted(overlap)}")
            seen.update(block.indices)
        return self

    @classmethod
    def of(cls, blocks: Sequence[Sequence[int]]) -> "Partition":
        """Build from plain index lists, raising PartitionError on invalid input."""
        try:
            return cls(blocks=[QubitSubset(indices=tuple(b)) for b in blocks])
        except ValidationError as e:
            raise PartitionError(f"Invalid partition {[list(b) for b in blocks]}: "
                                 f"{e.errors()[0]['msg']}")

    @classmethod
    def singletons(cls, qubits: Union[int, Sequence[int]]) -> "Partition":
        """One party per qubit; an int means the whole register 0..n-1."""
        if isinstance(qubits, int):
            qubits = range(qubits)
        return cls.of([[q] for q in qubits])

    @property
    def union(self) -> Tuple[int, ...]:
        return tuple(sorted(q for block in self.blocks for q in block.indices))

    @property
    def key(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(block.indices for block in self.blocks)

    @property
    def is_singleton(self) -> bool:
        return all(len(block.indices) == 1 for block in self.blocks)

    def label(self) -> str:
        return "D(" + ":".join(party_label(b.indices) for b in self.blocks) + ")"

    def snake_label(self) -> str:
        """Output-key form of the label, e.g. D(A1A2:A3) -> d_a1a2_a3."""
        return "d_" + "_".join(party_label(b.indices).lower() for b in self.blocks)

    def check_register(self, n_qubits: int) -> None:
        top = max(self.union)
        if top >= n_qubits:
            raise PartitionError(f"Qubit {top} out of range for a {n_qubits}-qubit register")

    def require_correlation(self) -> None:
        if len(self.blocks) < 2:
            raise PartitionError("A correlation quantity needs at least two blocks")


class OptimizerConfig(BaseModel):
    """Settings of the multi-start local search behind gqd."""
    restarts: int = Field(16, ge=1)
    grid_seeds_per_angle: int = Field(4, ge=0)
    max_iterations: int = Field(2000, ge=1)
    f_tol: float = Field(1e-8, gt=0)
    x_tol: float = Field(1e-6, gt=0)
    initial_step: float = Field(0.25, gt=0)
    seed: int = 0
    threads: int = Field(1, ge=1)


class GqdResult(BaseModel):
    """Minimized loss of correlation and where it was found."""
    value: float
    argmin: AngleSet
    evaluations: int = Field(..., ge=0)
    converged: bool
    starts: int
    best_start: int
    partition: Partition


class StateFamily(str, Enum):
    """State families the factory knows how to build."""
    GHZ = "ghz"
    W = "w"
    WERNER_GHZ = "werner-ghz"
    MIXED_W = "mixed-w"
    RANDOM = "random"


class StateSpec(BaseModel):
    """Specification of a state built by states.make_state."""
    family: StateFamily
    n_qubits: int = Field(..., ge=1)
    mu: float = Field(1.0, ge=0.0, le=1.0)
    rank: Optional[int] = Field(None, ge=1)
    seed: int = 0

    @model_validator(mode="after")
    def _check_family(self) -> "StateSpec":
        if self.family != StateFamily.RANDOM and self.n_qubits < 2:
            raise ValueError(f"'n_qubits' must be at least 2 for the {self.family.value} family")
        if self.rank is not None and self.rank > 2 ** self.n_qubits:
            raise ValueError(f"'rank' {self.rank} exceeds dimension {2 ** self.n_qubits}")
        return self

    def label(self) -> str:
        if self.family in (StateFamily.WERNER_GHZ, StateFamily.MIXED_W):
            return f"{self.family.value}(N={self.n_qubits}, mu={self.mu:g})"
        if self.family == StateFamily.RANDOM:
            return f"random(N={self.n_qubits}, rank={self.rank}, seed={self.seed})"
        return f"{self.family.value}(N={self.n_qubits})"


class AuditSpec(BaseModel):
    """Parameters of a monogamy audit."""
    cuts: List[int] = Field(default_factory=list)
    window: int = Field(1, ge=1)
    n_pow: int = Field(1, ge=0)
    tolerance: float = Field(0.0, ge=0.0)

    @field_validator("cuts")
    @classmethod
    def _check_cuts(cls, value: List[int]) -> List[int]:
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("cuts must be strictly increasing")
        if value and value[0] <= 1:
            raise ValueError("cuts must satisfy 1 < m_1")
        return value

    def check_register(self, n_parties: int) -> None:
        """Raise ConfigurationError if the cuts or window do not fit N parties."""
        if self.cuts and self.cuts[-1] >= n_parties:
            raise ConfigurationError(
                f"cuts {self.cuts} must satisfy m_n < N = {n_parties}", key="cuts")
        if self.window >= n_parties:
            raise ConfigurationError(
                f"window K={self.window} must satisfy K < N = {n_parties}", key="K")


class AuditReport(BaseModel):
    """One side-by-side evaluation of an inequality or identity."""
    name: str
    lhs: float
    rhs: float
    margin: float
    tolerance: float
    holds: bool
    condition_flags: Dict[str, bool] = Field(default_factory=dict)
    components: Dict[str, float] = Field(default_factory=dict)
    labels: Dict[str, str] = Field(default_factory=dict)
    converged: bool = True
    state: Optional[str] = None

    @classmethod
    def build(cls, name: str, lhs: float, rhs: float, tolerance: float,
              holds: Optional[bool] = None, **kwargs: Any) -> "AuditReport":
        margin = lhs - rhs
        if holds is None:
            holds = margin >= -tolerance
        return cls(name=name, lhs=lhs, rhs=rhs, margin=margin, tolerance=tolerance,
                   holds=holds, **kwargs)


class MonotonicityReport(BaseModel):
    """Discard-monotonicity margins D(A_1..A_k : A_k+1) - D(A_1 : A_k+1)."""
    margins: List[float]
    grouped: List[float]
    pairwise: List[float]
    tolerance: float
    condition_holds: bool


class HamiltonianSpec(BaseModel):
    """Transverse-field Ising ring with periodic boundary conditions."""
    L: int = Field(..., ge=3)
    J: float = Field(1.0, gt=0)
    B: float = Field(..., ge=0)
    boundary: str = Field("periodic", pattern="^periodic$")


class ThermalSpec(BaseModel):
    """Effective temperature in units of J (k_B = 1); T = 0 means ground state."""
    T: float = Field(0.0, ge=0.0)


class SweepRecord(BaseModel):
    """One row of a parameter sweep."""

    CSV_COLUMNS: ClassVar[Tuple[str, ...]] = (
        "param", "gqd_total", "nn_sum", "residual", "theta_bar", "converged")

    index: int
    param: float
    gqd_total: Optional[float] = None
    nn_sum: Optional[float] = None
    residual: Optional[float] = None
    theta_bar: Optional[float] = None
    converged: bool = False
    bond_gqds: List[float] = Field(default_factory=list)
    evaluations: int = 0
    error: Optional[str] = None
    diagnostics: Dict[str, float] = Field(default_factory=dict)

    def csv_row(self) -> Dict[str, Any]:
        return {column: getattr(self, column) for column in self.CSV_COLUMNS}


class SweepConfig(BaseModel):
    """Settings shared by all sweep drivers."""
    name: str
    grid: List[float] = Field(default_factory=list)
    threads: int = Field(1, ge=1)
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)
    ring_bonds: bool = False


class IsingSweepConfig(SweepConfig):
    """Field sweep B/J of a transverse-field Ising ring."""
    L: int = Field(..., ge=3)
    J: float = Field(1.0, gt=0)
    T: float = Field(0.0, ge=0.0)
    scan_points: int = Field(181, ge=3)
    refine_tol: float = Field(1e-10, gt=0)
    spot_check: bool = True


class MixtureSweepConfig(SweepConfig):
    """Mixing-weight sweep of a Werner-GHZ or mixed-W family."""
    family: StateFamily
    n_qubits: int = Field(..., ge=2)

    @field_validator("family")
    @classmethod
    def _check_family(cls, value: StateFamily) -> StateFamily:
        if value not in (StateFamily.WERNER_GHZ, StateFamily.MIXED_W):
            raise ValueError("mixture sweeps need the werner-ghz or mixed-w family")
        return value


class SweepResult(BaseModel):
    """Result of a sweep run."""
    name: str
    records: List[SweepRecord]
    started_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
    total_points: int
    error_count: int
    metadata: Dict[str, Any] = Field(default_factory=dict)


class RunCommand(str, Enum):
    STATE_INFO = "state-info"
    GQD = "gqd"
    AUDIT = "audit"
    SWEEP = "sweep"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class AuditKind(str, Enum):
    STANDARD = "standard"
    GENERAL = "general"
    SECOND_CLASS = "second-class"
    RESIDUAL = "residual"
    POWER = "power"
    IDENTITY = "identity"
    MONOTONICITY = "monotonicity"
    ORDERING = "ordering"
    LOWER_BOUND = "lower-bound"
    CLOSED_FORM = "closed-form"


class IdentityMode(str, Enum):
    TELESCOPING = "telescoping"
    BLOCK = "block"


def parse_grid(value: Union[str, Sequence[float]]) -> List[float]:
    """Parse 'start:stop:count', 'a,b,c' or '' into a list of floats."""
    if not isinstance(value, str):
        return [float(v) for v in value]
    text = value.strip()
    if not text:
        return []
    if ":" in text:
        start, stop, count = text.split(":")
        return [float(v) for v in np.linspace(float(start), float(stop), int(count))]
    return [float(v) for v in text.split(",") if v.strip()]


def parse_blocks(value: Union[str, Sequence[Sequence[int]]]) -> List[List[int]]:
    """Parse '0,1|2,3' into [[0, 1], [2, 3]]."""
    if not isinstance(value, str):
        return [[int(q) for q in block] for block in value]
    return [[int(q) for q in block.split(",") if q.strip()] for block in value.split("|")]


class RunConfig(BaseModel):
    """Everything one CLI command needs; keys match the command-line flags."""

    model_config = ConfigDict(extra="forbid")

    command: RunCommand
    family: Optional[StateFamily] = None
    n: Optional[int] = Field(None, ge=1)
    mu: float = Field(1.0, ge=0.0, le=1.0)
    rank: Optional[int] = Field(None, ge=1)
    L: Optional[int] = Field(None, ge=3)
    J: float = Field(1.0, gt=0)
    B: Optional[float] = Field(None, ge=0)
    T: float = Field(0.0, ge=0.0)
    K: int = Field(1, ge=1)
    cuts: List[int] = Field(default_factory=list)
    power: int = Field(1, ge=0)
    blocks: Optional[List[List[int]]] = None
    grid: Optional[List[float]] = None
    audit: AuditKind = AuditKind.STANDARD
    mode: IdentityMode = IdentityMode.TELESCOPING
    samples: int = Field(1, ge=1)
    ring_bonds: bool = False
    threads: int = Field(1, ge=1)
    seed: int = 0
    out: Optional[Path] = None
    format: Optional[OutputFormat] = None
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)

    @field_validator("cuts", mode="before")
    @classmethod
    def _parse_cuts(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [int(v) for v in value.split(",") if v.strip()]
        return value

    @field_validator("grid", mode="before")
    @classmethod
    def _parse_grid(cls, value: Any) -> Any:
        return None if value is None else parse_grid(value)

    @field_validator("blocks", mode="before")
    @classmethod
    def _parse_blocks(cls, value: Any) -> Any:
        return None if value is None else parse_blocks(value)

    @model_validator(mode="after")
    def _check_state_source(self) -> "RunConfig":
        if self.family is not None and self.L is not None:
            raise ValueError("'family' and 'L' are mutually exclusive")
        if self.family is None and self.L is None:
            raise ValueError("one of 'family' or 'L' is required")
        if self.family is not None and self.n is None:
            raise ValueError(f"'n' is required for the {self.family.value} family")
        if self.L is not None and self.command != RunCommand.SWEEP and self.B is None:
            raise ValueError("'B' is required for an Ising state")
        if self.command == RunCommand.SWEEP and self.family is not None and self.family not in (
                StateFamily.WERNER_GHZ, StateFamily.MIXED_W):
            raise ValueError("'family' must be werner-ghz or mixed-w for a sweep")
        if self.format == OutputFormat.CSV and self.command != RunCommand.SWEEP:
            raise ValueError("'format' csv is only available for sweep")
        return self

    def state_spec(self, seed: Optional[int] = None) -> StateSpec:
        return StateSpec(family=self.family, n_qubits=self.n, mu=self.mu, rank=self.rank,
                         seed=self.seed if seed is None else seed)

    def hamiltonian_spec(self, field: Optional[float] = None) -> HamiltonianSpec:
        return HamiltonianSpec(L=self.L, J=self.J, B=(self.B if field is None else field))

    def thermal_spec(self) -> ThermalSpec:
        return ThermalSpec(T=self.T)

    def audit_spec(self) -> AuditSpec:
        return AuditSpec(cuts=self.cuts, window=self.K, n_pow=self.power)

    def optimizer_config(self) -> OptimizerConfig:
        return self.optimizer.model_copy(update={"seed": self.seed, "threads": self.threads})

    def output_format(self) -> OutputFormat:
        if self.format is not None:
            return self.format
        return OutputFormat.CSV if self.command == RunCommand.SWEEP else OutputFormat.JSON
