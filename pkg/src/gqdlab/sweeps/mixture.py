"""Mixing-weight sweep of Werner-GHZ and mixed-W states."""

from typing import Any, Dict

from pydantic import ValidationError

from ..core.base import BaseSweep, PointTotal
from ..core.exceptions import ConfigurationError
from ..core.models import MixtureSweepConfig, Partition, StateSpec
from ..discord import gqd
from ..qstate import DensityMatrix
from ..states import make_state


class MixtureSweep(BaseSweep):
    """Sweep of mu in (1 - mu) I / 2^N + mu |psi><psi| with the full optimizer."""

    def __init__(self, config: MixtureSweepConfig):
        super().__init__(config)
        self.config: MixtureSweepConfig = config

    def _prepare_state(self, param: float) -> DensityMatrix:
        try:
            spec = StateSpec(family=self.config.family, n_qubits=self.config.n_qubits, mu=param)
        except ValidationError as e:
            raise ConfigurationError(f"Invalid mixing weight mu={param}: "
                                     f"{e.errors()[0]['msg']}", key="grid")
        return make_state(spec)

    def _total_gqd(self, rho: DensityMatrix) -> PointTotal:
        result = gqd(rho, Partition.singletons(rho.n_qubits), self.config.optimizer)
        return PointTotal(
            value=result.value,
            converged=result.converged,
            evaluations=result.evaluations,
            warm_start=result.argmin,
        )

    def _metadata(self) -> Dict[str, Any]:
        return {"family": self.config.family.value, "n_qubits": self.config.n_qubits,
                "ring_bonds": self.config.ring_bonds}
