"""Test the base sweep functionality and the sweep drivers."""

import pytest

from gqdlab.core.base import BaseSweep, PointTotal
from gqdlab.core.exceptions import ConfigurationError
from gqdlab.core.models import (
    AngleSet,
    HamiltonianSpec,
    IsingSweepConfig,
    MixtureSweepConfig,
    StateFamily,
    StateSpec,
    SweepConfig,
)
from gqdlab.ising import symmetric_gqd_scan, thermal_state
from gqdlab.processors import is_unimodal
from gqdlab.qstate import DensityMatrix
from gqdlab.states import make_state
from gqdlab.sweeps import IsingRingSweep, MixtureSweep


class FakeSweep(BaseSweep):
    """Test implementation of BaseSweep over Werner-GHZ states with a fixed total."""

    def _prepare_state(self, param: float) -> DensityMatrix:
        if param < 0:
            raise ConfigurationError("negative parameter", key="grid")
        return make_state(StateSpec(family="werner-ghz", n_qubits=3, mu=param))

    def _total_gqd(self, rho: DensityMatrix) -> PointTotal:
        return PointTotal(value=1.0, converged=True, evaluations=1,
                          warm_start=AngleSet.zeros(rho.n_qubits), theta_bar=0.0)


@pytest.fixture
def sweep_config(fast_optimizer):
    """Small sweep configuration."""
    return SweepConfig(name="fake", grid=[0.0, 0.5, 1.0], optimizer=fast_optimizer)


class TestBaseSweep:
    """Test cases for BaseSweep."""

    def test_sweep_initialization(self, sweep_config):
        """Test sweep initializes correctly."""
        fake = FakeSweep(sweep_config)
        assert fake.config.name == "fake"
        assert fake.config.threads == 1

    def test_run_success(self, sweep_config):
        """Test a successful run fills every record."""
        result = FakeSweep(sweep_config).run()
        assert result.name == "fake"
        assert result.total_points == 3
        assert result.error_count == 0
        assert [r.index for r in result.records] == [0, 1, 2]
        assert "sweep_duration_seconds" in result.metadata
        for record in result.records:
            assert len(record.bond_gqds) == 2
            assert record.residual == pytest.approx(1.0 - record.nn_sum)

    def test_pure_ghz_bonds_vanish(self, sweep_config):
        """Test GHZ_3 bonds are classical, so the residual equals the total."""
        record = FakeSweep(sweep_config).run().records[-1]
        assert abs(record.nn_sum) < 1e-9
        assert record.residual == pytest.approx(1.0, abs=1e-9)

    def test_failed_point_becomes_error_record(self, sweep_config):
        """Test a failing grid point is recorded rather than raised."""
        config = sweep_config.model_copy(update={"grid": [0.5, -1.0]})
        result = FakeSweep(config).run()
        assert result.error_count == 1
        assert result.records[1].error == "negative parameter"
        assert result.records[1].gqd_total is None
        assert not result.records[1].converged

    def test_threaded_order(self, sweep_config):
        """Test records come back in grid order when run on several threads."""
        config = sweep_config.model_copy(update={"threads": 3, "grid": [1.0, 0.2, 0.6, 0.0]})
        serial = FakeSweep(sweep_config.model_copy(update={"grid": config.grid})).run()
        threaded = FakeSweep(config).run()
        assert [r.param for r in threaded.records] == [1.0, 0.2, 0.6, 0.0]
        assert [r.nn_sum for r in threaded.records] == [r.nn_sum for r in serial.records]

    def test_progress_callback(self, sweep_config):
        """Test progress is reported once per point."""
        seen = []
        FakeSweep(sweep_config).run(progress=seen.append)
        assert len(seen) == 3

    def test_ring_bonds(self, sweep_config):
        """Test ring_bonds adds the closing pair."""
        fake = FakeSweep(sweep_config.model_copy(update={"ring_bonds": True}))
        assert fake._bond_pairs(3) == [(0, 1), (1, 2), (2, 0)]
        assert FakeSweep(sweep_config)._bond_pairs(3) == [(0, 1), (1, 2)]

    def test_point_total_diagnostics_not_shared(self, sweep_config):
        """Test records built without diagnostics get their own empty dicts."""
        assert PointTotal(value=0.0, converged=True, evaluations=0,
                          warm_start=AngleSet.zeros(2)).diagnostics is None
        first, second = FakeSweep(sweep_config).run().records[:2]
        first.diagnostics["marker"] = 1.0
        assert second.diagnostics == {}

    def test_empty_grid(self, sweep_config):
        """Test an empty grid gives an empty result."""
        result = FakeSweep(sweep_config.model_copy(update={"grid": []})).run()
        assert result.records == []
        assert result.total_points == 0


class TestDrivers:
    """Test cases for the Ising and mixture sweep drivers."""

    def test_mixture_sweep(self, fast_optimizer):
        """Test the Werner-GHZ sweep vanishes at mu = 0 and reaches one at mu = 1."""
        config = MixtureSweepConfig(name="werner", grid=[0.0, 1.0], optimizer=fast_optimizer,
                                    family=StateFamily.WERNER_GHZ, n_qubits=3)
        result = MixtureSweep(config).run()
        first, last = result.records
        assert abs(first.gqd_total) < 1e-9
        assert last.gqd_total == pytest.approx(1.0, abs=1e-4)
        assert last.theta_bar is None
        assert result.metadata["family"] == "werner-ghz"

    def test_mixture_rejects_mu_outside_range(self, fast_optimizer):
        """Test mixing weights above one produce error records."""
        config = MixtureSweepConfig(name="w", grid=[1.5], optimizer=fast_optimizer,
                                    family=StateFamily.MIXED_W, n_qubits=3)
        assert MixtureSweep(config).run().records[0].error is not None

    def test_ising_sweep_metadata(self, fast_optimizer):
        """Test the Ising driver reports its ring parameters and diagnostics."""
        config = IsingSweepConfig(name="ising", grid=[0.8], optimizer=fast_optimizer,
                                  L=3, spot_check=False)
        result = IsingRingSweep(config).run()
        assert result.metadata["L"] == 3
        record = result.records[0]
        assert record.converged
        assert record.diagnostics["translation_defect"] < 1e-8
        assert -1.0 <= record.diagnostics["transverse_magnetization"] <= 0.0

    def test_ising_total_is_smaller_of_scan_and_full(self, fast_optimizer):
        """Test small rings report the lower of the symmetric scan and the full optimizer."""
        config = IsingSweepConfig(name="ising", grid=[2.0], optimizer=fast_optimizer, L=3)
        record = IsingRingSweep(config).run().records[0]
        scan = symmetric_gqd_scan(thermal_state(HamiltonianSpec(L=3, B=2.0)))
        expected = min(scan.value, record.diagnostics["spot_check_value"])
        assert record.gqd_total == pytest.approx(expected, abs=1e-12)
        assert record.gqd_total <= scan.value + 1e-12

    @pytest.mark.slow
    def test_mixed_w_gap_unimodal(self):
        """Test the four-qubit mixed W total stays above the nn-sum with a single-peaked gap."""
        grid = [round(0.05 * i, 2) for i in range(21)]
        config = MixtureSweepConfig(name="mixed-w", grid=grid, family=StateFamily.MIXED_W,
                                    n_qubits=4)
        records = MixtureSweep(config).run().records
        gaps = [r.gqd_total - r.nn_sum for r in records]
        assert min(gaps) >= -1e-6
        assert is_unimodal(gaps, tolerance=1e-6)
        assert max(gaps) > gaps[0] + 1e-3
