"""Base sweep class and common functionality."""

import time
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor, as_completed
from datetime import datetime, timezone
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import structlog

from ..discord import gqd
from ..qstate import DensityMatrix
from .exceptions import GqdLabError
from .models import AngleSet, Partition, SweepConfig, SweepRecord, SweepResult


logger = structlog.get_logger(__name__)

ProgressCallback = Callable[[SweepRecord], None]


class PointTotal(NamedTuple):
    """Total GQD at one grid point and the measurement used to warm-start the bonds."""
    value: float
    converged: bool
    evaluations: int
    warm_start: AngleSet
    theta_bar: Optional[float] = None
    diagnostics: Optional[Dict[str, float]] = None


class BaseSweep(ABC):
    """Abstract base class for all parameter sweeps."""

    def __init__(self, config: SweepConfig):
        """Initialize the sweep with configuration."""
        self.config = config
        self.logger = logger.bind(sweep=config.name)

    @abstractmethod
    def _prepare_state(self, param: float) -> DensityMatrix:
        """Build the state at one grid parameter. Must be implemented by subclasses."""

    @abstractmethod
    def _total_gqd(self, rho: DensityMatrix) -> PointTotal:
        """GQD over all single-qubit parties. Must be implemented by subclasses."""

    def _metadata(self) -> Dict[str, Any]:
        """Extra metadata for the result. Can be overridden."""
        return {}

    def _bond_pairs(self, n_sites: int) -> List[Tuple[int, int]]:
        """Nearest-neighbor pairs (i, i+1); the closing bond only with ring_bonds."""
        pairs = [(i, i + 1) for i in range(n_sites - 1)]
        if self.config.ring_bonds and n_sites > 2:
            pairs.append((n_sites - 1, 0))
        return pairs

    def _evaluate_point(self, index: int, param: float) -> SweepRecord:
        """Total GQD, bond GQDs and residual at one grid point."""
        try:
            rho = self._prepare_state(param)
            total = self._total_gqd(rho)
            bonds = [
                gqd(rho, Partition.of([[a], [b]]), self.config.optimizer,
                    warm_starts=[total.warm_start])
                for a, b in self._bond_pairs(rho.n_qubits)
            ]
        except GqdLabError as e:
            self.logger.warning("Grid point failed", index=index, param=param, error=str(e))
            return SweepRecord(index=index, param=param, error=str(e))

        bond_values = [bond.value for bond in bonds]
        nn_sum = sum(bond_values)
        return SweepRecord(
            index=index,
            param=param,
            gqd_total=total.value,
            nn_sum=nn_sum,
            residual=total.value - nn_sum,
            theta_bar=total.theta_bar,
            converged=total.converged and all(bond.converged for bond in bonds),
            bond_gqds=bond_values,
            evaluations=total.evaluations + sum(bond.evaluations for bond in bonds),
            diagnostics=dict(total.diagnostics or {}),
        )

    def run(self, progress: Optional[ProgressCallback] = None) -> SweepResult:
        """Main method that evaluates every grid point and assembles the result."""
        grid: Sequence[float] = self.config.grid
        start_time = datetime.now(timezone.utc)
        started = time.perf_counter()
        records: List[SweepRecord] = []

        self.logger.info("Starting sweep", points=len(grid), threads=self.config.threads)

        if self.config.threads > 1:
            with ThreadPoolExecutor(max_workers=self.config.threads) as pool:
                futures = [pool.submit(self._evaluate_point, i, p) for i, p in enumerate(grid)]
                for future in as_completed(futures):
                    record = future.result()
                    records.append(record)
                    if progress:
                        progress(record)
        else:
            for i, param in enumerate(grid):
                record = self._evaluate_point(i, param)
                records.append(record)
                if progress:
                    progress(record)

        records.sort(key=lambda r: r.index)
        end_time = datetime.now(timezone.utc)
        duration = time.perf_counter() - started
        result = SweepResult(
            name=self.config.name,
            records=records,
            started_at=start_time,
            total_points=len(records),
            error_count=sum(1 for r in records if r.error),
            metadata={
                "sweep_duration_seconds": duration,
                "start_time": start_time.isoformat(),
                "end_time": end_time.isoformat(),
                **self._metadata(),
            },
        )

        self.logger.info(
            "Sweep completed",
            total_points=result.total_points,
            errors=result.error_count,
            duration=duration,
        )
        return result
