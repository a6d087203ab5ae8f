"""Test monogamy deficits, residual GQD, the power inequality and identity audits."""

import numpy as np
import pytest

from gqdlab.core.exceptions import ConfigurationError, PartitionError
from gqdlab.core.models import AngleSet, AuditSpec, IdentityMode, StateFamily, StateSpec
from gqdlab.monogamy import (
    DiscordTerms,
    blocks_from_cuts,
    deficit_ordering,
    general_deficit,
    general_groups,
    identity_audit,
    identity_report,
    lower_bound_report,
    mixed_w_closed_form_report,
    power_inequality_check,
    residual_gqd,
    second_class_audit,
    standard_deficit,
)
from gqdlab.states import (
    make_state,
    mixed_w_residual_closed_form,
    mixed_w_residual_fixed_basis,
    random_density,
)


class TestDiscordTerms:
    """Test cases for the per-state term cache."""

    def test_caches_minimized_terms(self, ghz, fast_optimizer):
        """Test a term is optimized once and reused."""
        terms = DiscordTerms(ghz(3), fast_optimizer)
        first = terms.result([[0], [1]])
        assert terms.result([[0], [1]]) is first
        assert terms.result([[0], [1], [2]]) is terms.total()

    def test_fixed_total_matches_minimum(self, fast_optimizer):
        """Test the total evaluated at its own argmin reproduces the minimum."""
        terms = DiscordTerms(random_density(3, 2, seed=6), fast_optimizer)
        assert terms.fixed([[0], [1], [2]]) == pytest.approx(terms.total().value, abs=1e-9)

    def test_foreign_cache_rejected(self, ghz, fast_optimizer):
        """Test a cache built for another state is refused."""
        terms = DiscordTerms(ghz(3), fast_optimizer)
        with pytest.raises(ConfigurationError):
            standard_deficit(ghz(3), terms=terms)

    def test_single_qubit_rejected(self):
        """Test one-qubit states are refused."""
        with pytest.raises(ConfigurationError):
            DiscordTerms(random_density(1, seed=0))


class TestStandardDeficit:
    """Test cases for the standard monogamy deficit."""

    def test_ghz3(self, ghz, fast_optimizer):
        """Test GHZ_3 has deficit one with vanishing pairwise terms."""
        report = standard_deficit(ghz(3), fast_optimizer)
        assert report.lhs == pytest.approx(1.0, abs=1e-4)
        assert abs(report.rhs) < 1e-6
        assert report.margin == pytest.approx(1.0, abs=1e-4)
        assert report.holds
        assert report.condition_flags["min_d_a1a2_a3_ge_d_a1_a3"]
        assert report.labels["min_d_a1a2_a3_ge_d_a1_a3"] == "min:D(A1A2:A3)>=D(A1:A3)"
        assert report.name == "standard_deficit"

    def test_output_keys_are_snake_case(self, ghz, fast_optimizer):
        """Test component and flag keys are snake case with readable labels alongside."""
        report = standard_deficit(ghz(3), fast_optimizer)
        assert set(report.components) == {"d_a1_a2_a3", "d_a1_a2", "d_a1_a3"}
        assert report.labels["d_a1_a2_a3"] == "D(A1:A2:A3)"
        for key in list(report.components) + list(report.condition_flags):
            assert key == key.lower()
            assert all(ch.isalnum() or ch == "_" for ch in key)
            assert key in report.labels

    def test_product_state(self, product_state, fast_optimizer):
        """Test product states have zero deficit."""
        report = standard_deficit(product_state, fast_optimizer)
        assert abs(report.margin) < 1e-9
        assert report.holds

    def test_needs_three_parties(self, bell_state):
        """Test two-party states are refused."""
        with pytest.raises(ConfigurationError):
            standard_deficit(bell_state)

    def test_tolerance_includes_noise_budget(self, ghz, fast_optimizer):
        """Test the reported tolerance adds the optimizer noise budget."""
        report = standard_deficit(ghz(3), fast_optimizer, tolerance=0.01)
        assert report.tolerance == pytest.approx(0.01 + 1e-6)


class TestGeneralDeficit:
    """Test cases for the general monogamy family."""

    def test_groups(self):
        """Test party groups for N = 6 with cuts (3, 5)."""
        assert general_groups(6, [3, 5]) == [[0, 1, 2], [0, 3, 4], [0, 5]]

    def test_ghz4(self, ghz, fast_optimizer):
        """Test GHZ_4 with one cut has general deficit one."""
        report = general_deficit(ghz(4), AuditSpec(cuts=[2]), fast_optimizer)
        assert report.margin == pytest.approx(1.0, abs=1e-4)
        assert report.holds

    def test_cut_out_of_range(self, ghz):
        """Test cuts at N raise ConfigurationError."""
        with pytest.raises(ConfigurationError):
            general_deficit(ghz(3), AuditSpec(cuts=[3]))

    def test_ordering_ghz4(self, ghz, fast_optimizer):
        """Test the standard and general deficits of GHZ_4 agree."""
        report = deficit_ordering(ghz(4), AuditSpec(cuts=[2]), fast_optimizer)
        assert abs(report.margin) < 1e-6
        assert report.holds
        assert set(report.components) == {"deficit_d_a1_a2", "deficit_d_a1_a3_a4"}
        assert report.labels["deficit_d_a1_a2"] == "deficit: D(A1:A2)"

    def test_ordering_product_state(self, product_state, fast_optimizer):
        """Test the ordering margin vanishes for a product state."""
        report = deficit_ordering(product_state, AuditSpec(cuts=[2]), fast_optimizer)
        assert abs(report.margin) < 1e-9

    @pytest.mark.slow
    def test_ordering_on_five_qubit_corpus(self):
        """Test the general deficit never exceeds the standard one on five-qubit states."""
        states = [make_state(StateSpec(family=family, n_qubits=5))
                  for family in (StateFamily.GHZ, StateFamily.W)]
        states += [random_density(5, 2, seed=seed) for seed in range(10)]
        for rho in states:
            report = deficit_ordering(rho, AuditSpec(cuts=[3]))
            assert report.margin >= -1e-6


class TestSecondClass:
    """Test cases for the second-class inequality and residual GQD."""

    def test_ghz4_window_two(self, ghz, fast_optimizer):
        """Test GHZ_4 with K = 2 has lhs one and rhs zero."""
        report = second_class_audit(ghz(4), AuditSpec(window=2), fast_optimizer)
        assert report.name == "second_class_K2"
        assert report.lhs == pytest.approx(1.0, abs=1e-4)
        assert abs(report.rhs) < 1e-6
        assert report.holds

    def test_window_one_has_zero_rhs(self, ghz, fast_optimizer):
        """Test K = 1 compares against zero."""
        report = second_class_audit(ghz(3), AuditSpec(window=1), fast_optimizer)
        assert report.rhs == 0.0

    def test_residual_is_window_one_margin(self, fast_optimizer):
        """Test the residual GQD equals the K = 1 margin on a shared cache."""
        rho = random_density(3, 2, seed=12)
        terms = DiscordTerms(rho, fast_optimizer)
        report = second_class_audit(rho, AuditSpec(window=1), terms=terms)
        assert residual_gqd(rho, terms=terms) == report.margin

    def test_werner_ghz_residual(self, fast_optimizer):
        """Test the pure GHZ_3 end of the Werner family has residual one."""
        rho = make_state(StateSpec(family=StateFamily.WERNER_GHZ, n_qubits=3, mu=1.0))
        assert residual_gqd(rho, fast_optimizer) == pytest.approx(1.0, abs=1e-4)

    def test_mixed_w_closed_form_report(self, fast_optimizer):
        """Test the mixed W residual is set against the printed and the fixed-basis forms."""
        rho = make_state(StateSpec(family=StateFamily.MIXED_W, n_qubits=3, mu=0.5))
        terms = DiscordTerms(rho, fast_optimizer)
        report = mixed_w_closed_form_report(rho, 0.5, terms=terms)
        assert report.name == "mixed_w_closed_form"
        assert report.lhs == residual_gqd(rho, terms=terms)
        assert report.rhs == pytest.approx(0.7865242, abs=1e-6)
        assert report.components["fixed_basis"] == pytest.approx(0.2022463, abs=1e-6)
        assert report.components["numeric_total"] <= report.components["bracket_total"] + 1e-6
        assert not report.holds

    @pytest.mark.slow
    @pytest.mark.parametrize("n_qubits", [3, 4])
    def test_mixed_w_closed_form_grid(self, n_qubits):
        """Test the mixed W report over the weight grid against both closed forms."""
        for mu in [round(0.1 * i, 1) for i in range(1, 10)]:
            rho = make_state(StateSpec(family=StateFamily.MIXED_W, n_qubits=n_qubits, mu=mu))
            terms = DiscordTerms(rho)
            report = mixed_w_closed_form_report(rho, mu, terms=terms)
            assert report.lhs == residual_gqd(rho, terms=terms)
            assert report.rhs == pytest.approx(mixed_w_residual_closed_form(n_qubits, mu))
            assert report.components["fixed_basis"] == \
                pytest.approx(mixed_w_residual_fixed_basis(n_qubits, mu))
            assert report.components["numeric_total"] <= \
                report.components["bracket_total"] + 1e-6
            assert report.holds == (abs(report.margin) <= 5e-3)

    @pytest.mark.slow
    @pytest.mark.parametrize("mu", [0.5, 0.9])
    def test_werner_ghz_residual_grows_with_n(self, mu):
        """Test the Werner-GHZ residual is nonnegative and grows with N by shrinking steps."""
        residuals = [
            residual_gqd(make_state(StateSpec(family=StateFamily.WERNER_GHZ, n_qubits=n, mu=mu)))
            for n in range(2, 7)
        ]
        assert min(residuals) >= -1e-6
        steps = np.diff(residuals)
        assert np.all(steps >= -1e-5)
        assert np.all(np.diff(steps) <= 1e-5)

    def test_window_too_large(self, ghz):
        """Test K >= N raises ConfigurationError naming K."""
        with pytest.raises(ConfigurationError) as excinfo:
            second_class_audit(ghz(3), AuditSpec(window=3))
        assert excinfo.value.key == "K"


class TestPowerAndLowerBounds:
    """Test cases for the power inequality and its lower-bound corollaries."""

    def test_ghz4_square(self, ghz, fast_optimizer):
        """Test GHZ_4 split {01|23} satisfies the n = 2 power inequality."""
        report = power_inequality_check(ghz(4), [[0, 1], [2, 3]], 2, fast_optimizer)
        assert report.name == "power_n2"
        assert report.lhs == pytest.approx(1.0, abs=1e-4)
        assert report.holds

    def test_zero_exponent(self, ghz):
        """Test n < 1 raises ConfigurationError naming the exponent."""
        with pytest.raises(ConfigurationError) as excinfo:
            power_inequality_check(ghz(4), [[0, 1], [2, 3]], 0)
        assert excinfo.value.key == "power"

    def test_blocks_must_cover_register(self, ghz):
        """Test blocks missing a qubit raise PartitionError."""
        with pytest.raises(PartitionError):
            power_inequality_check(ghz(4), [[0, 1], [2]], 1)

    def test_random_state_bounds(self, fast_optimizer):
        """Test both lower bounds hold on a random state."""
        rho = random_density(4, 3, seed=23)
        reports = lower_bound_report(rho, [[0, 1], [2, 3]], fast_optimizer)
        assert [r.name for r in reports] == ["lower_bound_blocks", "lower_bound_between"]
        assert all(r.holds for r in reports)

    @pytest.mark.slow
    @pytest.mark.parametrize("n_pow", [1, 2, 3])
    def test_w4_power(self, n_pow):
        """Test W_4 split {01|23} satisfies the power inequality for n = 1, 2, 3."""
        rho = make_state(StateSpec(family=StateFamily.W, n_qubits=4))
        report = power_inequality_check(rho, [[0, 1], [2, 3]], n_pow)
        assert report.margin >= -1e-6

    def test_power_one_on_random_state(self, fast_optimizer):
        """Test the n = 1 power inequality holds on a random state."""
        rho = random_density(3, 2, seed=29)
        report = power_inequality_check(rho, [[0, 1], [2]], 1, fast_optimizer)
        assert report.holds


class TestIdentities:
    """Test cases for the fixed-measurement identities."""

    @pytest.mark.parametrize("n_qubits", [3, 4])
    def test_telescoping(self, rng, n_qubits):
        """Test the telescoping identity at random measurements."""
        for seed in range(3):
            rho = random_density(n_qubits, 2 + seed, seed=seed)
            angles = AngleSet.from_vector(rng.uniform(0, np.pi, 2 * n_qubits))
            assert identity_audit(rho, angles) < 1e-9

    @pytest.mark.parametrize("n_qubits,cuts", [(3, [1]), (4, [2]), (4, [1, 3])])
    def test_block(self, rng, n_qubits, cuts):
        """Test the block identity at random measurements."""
        rho = random_density(n_qubits, 3, seed=n_qubits)
        angles = AngleSet.from_vector(rng.uniform(0, np.pi, 2 * n_qubits))
        report = identity_report(rho, angles, IdentityMode.BLOCK, cuts=cuts)
        assert report.name == "identity_block"
        assert report.holds
        assert abs(report.margin) < 1e-9

    def test_block_needs_cuts(self, ghz):
        """Test the block identity without cuts or blocks is refused."""
        with pytest.raises(ConfigurationError):
            identity_report(ghz(3), AngleSet.zeros(3), IdentityMode.BLOCK)

    def test_blocks_from_cuts(self):
        """Test contiguous blocks from cut points."""
        assert blocks_from_cuts(4, [2]) == [[0, 1], [2, 3]]
        assert blocks_from_cuts(5, [1, 3]) == [[0], [1, 2], [3, 4]]
        with pytest.raises(ConfigurationError):
            blocks_from_cuts(4, [4])
