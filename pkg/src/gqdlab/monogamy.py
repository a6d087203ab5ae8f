"""Monogamy deficits, the second-class inequality, residual GQD, the power inequality and
fixed-measurement identity audits.

Parties are the register's qubits in order: qubit i is party A_{i+1}. Every minimized term
of one state goes through a DiscordTerms cache, so a term shared by several audits is
optimized once and every sub-term is warm-started from the total GQD's argmin.
"""

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import structlog

from .core.exceptions import ConfigurationError, PartitionError
from .core.models import (
    AngleSet,
    AuditReport,
    AuditSpec,
    GqdResult,
    IdentityMode,
    OptimizerConfig,
    Partition,
)
from .discord import OPTIMIZER_NOISE_BUDGET, CorrelationLoss, gqd
from .qstate import DensityMatrix
from .states import (
    mixed_w_brackets,
    mixed_w_residual_closed_form,
    mixed_w_residual_fixed_basis,
)


logger = structlog.get_logger(__name__)

IDENTITY_TOLERANCE = 1e-9

Blocks = Sequence[Sequence[int]]
Key = Tuple[Tuple[int, ...], ...]


def _key(blocks: Blocks) -> Key:
    return Partition.of(blocks).key


def _singletons(qubits: Iterable[int]) -> List[List[int]]:
    return [[q] for q in qubits]


class DiscordTerms:
    """Minimized and fixed-measurement GQD terms of one state.

    Fixed-measurement terms use the total GQD's argmin as the shared measurement.
    """

    def __init__(self, rho: DensityMatrix, cfg: Optional[OptimizerConfig] = None):
        if rho.n_qubits < 2:
            raise ConfigurationError("Monogamy audits need at least two parties", key="n")
        self.rho = rho
        self.cfg = cfg or OptimizerConfig()
        self.n_parties = rho.n_qubits
        self.total_blocks = _singletons(range(self.n_parties))
        self._minimized: Dict[Key, GqdResult] = {}
        self._fixed: Dict[Key, float] = {}
        self._total: Optional[GqdResult] = None
        self.log = logger.bind(n_parties=self.n_parties)

    def total(self) -> GqdResult:
        if self._total is None:
            self._total = gqd(self.rho, Partition.of(self.total_blocks), self.cfg)
            self._minimized[_key(self.total_blocks)] = self._total
        return self._total

    def result(self, blocks: Blocks) -> GqdResult:
        key = _key(blocks)
        if key == _key(self.total_blocks):
            return self.total()
        if key not in self._minimized:
            self._minimized[key] = gqd(self.rho, Partition.of(blocks), self.cfg,
                                       warm_starts=[self.total().argmin])
        return self._minimized[key]

    def value(self, blocks: Blocks) -> float:
        return self.result(blocks).value

    def fixed(self, blocks: Blocks) -> float:
        """Loss of correlation of `blocks` at the total GQD's argmin."""
        key = _key(blocks)
        if key not in self._fixed:
            objective = CorrelationLoss(self.rho, Partition.of(blocks))
            self._fixed[key] = objective.at(self.total().argmin)
        return self._fixed[key]

    @property
    def converged(self) -> bool:
        return all(result.converged for result in self._minimized.values())

    @property
    def argmin(self) -> AngleSet:
        return self.total().argmin


def _terms_for(rho: DensityMatrix, cfg: Optional[OptimizerConfig],
               terms: Optional[DiscordTerms]) -> DiscordTerms:
    if terms is None:
        return DiscordTerms(rho, cfg)
    if terms.rho is not rho:
        raise ConfigurationError("DiscordTerms cache belongs to a different state")
    return terms


class _Entries:
    """Components and condition flags of one report under snake-case keys, with labels."""

    def __init__(self) -> None:
        self.components: Dict[str, float] = {}
        self.flags: Dict[str, bool] = {}
        self.labels: Dict[str, str] = {}

    def term(self, blocks: Blocks, value: float, prefix: str = "") -> float:
        partition = Partition.of(blocks)
        key = f"{prefix}_{partition.snake_label()}" if prefix else partition.snake_label()
        self.components[key] = value
        self.labels[key] = f"{prefix}: {partition.label()}" if prefix else partition.label()
        return value

    def flag(self, key: str, label: str, held: bool) -> None:
        self.flags[key] = held
        self.labels[key] = label


def _discard_flags(terms: DiscordTerms, entries: _Entries,
                   comparisons: Iterable[Tuple[Blocks, Blocks]], tolerance: float) -> None:
    """Discard-monotonicity checks at the minimized and at the fixed-measurement level."""
    for larger, smaller in comparisons:
        if _key(larger) == _key(smaller):
            continue
        big, small = Partition.of(larger), Partition.of(smaller)
        key = f"{big.snake_label()}_ge_{small.snake_label()}"
        label = f"{big.label()}>={small.label()}"
        entries.flag(f"min_{key}", f"min:{label}",
                     terms.value(larger) >= terms.value(smaller) - tolerance)
        entries.flag(f"fixed_{key}", f"fixed:{label}",
                     terms.fixed(larger) >= terms.fixed(smaller) - tolerance)


def _report(terms: DiscordTerms, name: str, lhs: float, rhs: float, tolerance: float,
            entries: _Entries) -> AuditReport:
    flags = entries.flags
    report = AuditReport.build(name, lhs, rhs, tolerance, condition_flags=flags,
                               components=entries.components, labels=entries.labels,
                               converged=terms.converged)
    minimized = [held for flag, held in flags.items() if flag.startswith("min_")]
    if not report.holds and all(minimized):
        terms.log.warning("Inequality violated with discard conditions met",
                          audit=name, margin=report.margin)
    return report


def _require_parties(terms: DiscordTerms, minimum: int) -> None:
    if terms.n_parties < minimum:
        raise ConfigurationError(
            f"Audit needs at least {minimum} parties, state has {terms.n_parties}", key="n")


def _standard_comparisons(parties: Sequence[int]) -> List[Tuple[Blocks, Blocks]]:
    """(A_1..A_k : A_k+1) against (A_1 : A_k+1) for the parties of one term."""
    first = parties[0]
    return [([list(parties[:k]), [parties[k]]], [[first], [parties[k]]])
            for k in range(2, len(parties))]


def standard_deficit(rho: DensityMatrix, cfg: Optional[OptimizerConfig] = None,
                     tolerance: float = 0.0,
                     terms: Optional[DiscordTerms] = None) -> AuditReport:
    """Delta D_S = D(A_1:...:A_N) - sum_k D(A_1:A_k+1)."""
    terms = _terms_for(rho, cfg, terms)
    _require_parties(terms, 3)
    tol = tolerance + OPTIMIZER_NOISE_BUDGET
    total = terms.total().value
    entries = _Entries()
    entries.term(terms.total_blocks, total)
    pairwise = 0.0
    for k in range(1, terms.n_parties):
        pair = [[0], [k]]
        pairwise += entries.term(pair, terms.value(pair))
    _discard_flags(terms, entries, _standard_comparisons(range(terms.n_parties)), tol)
    return _report(terms, "standard_deficit", total, pairwise, tol, entries)


def general_groups(n_parties: int, cuts: Sequence[int]) -> List[List[int]]:
    """Party groups of the general monogamy family, 0-based.

    The first group is A_1..A_m1; each later group is A_1 with A_{m_i+1}..A_{m_i+1}.
    """
    bounds = list(cuts) + [n_parties]
    groups = [list(range(bounds[0]))]
    for start, stop in zip(bounds, bounds[1:]):
        groups.append([0] + list(range(start, stop)))
    return groups


def general_deficit(rho: DensityMatrix, spec: AuditSpec,
                    cfg: Optional[OptimizerConfig] = None,
                    terms: Optional[DiscordTerms] = None) -> AuditReport:
    """Delta D_G of the general monogamy family for the cut points in `spec`."""
    terms = _terms_for(rho, cfg, terms)
    _require_parties(terms, 3)
    spec.check_register(terms.n_parties)
    tol = spec.tolerance + OPTIMIZER_NOISE_BUDGET
    total = terms.total().value
    entries = _Entries()
    entries.term(terms.total_blocks, total)
    grouped = 0.0
    for group in general_groups(terms.n_parties, spec.cuts):
        blocks = _singletons(group)
        grouped += entries.term(blocks, terms.value(blocks))

    comparisons: List[Tuple[Blocks, Blocks]] = []
    bounds = list(spec.cuts) + [terms.n_parties]
    for start, stop in zip(bounds, bounds[1:]):
        for k in range(start, stop):
            comparisons.append(([list(range(k)), [k]], [[0] + list(range(start, k)), [k]]))
    _discard_flags(terms, entries, comparisons, tol)
    return _report(terms, "general_deficit", total, grouped, tol, entries)


def deficit_ordering(rho: DensityMatrix, spec: AuditSpec,
                     cfg: Optional[OptimizerConfig] = None,
                     terms: Optional[DiscordTerms] = None) -> AuditReport:
    """Delta D_S - Delta D_G, split into the standard deficit of each general term."""
    terms = _terms_for(rho, cfg, terms)
    standard = standard_deficit(rho, tolerance=spec.tolerance, terms=terms)
    general = general_deficit(rho, spec, terms=terms)
    entries = _Entries()
    for group in general_groups(terms.n_parties, spec.cuts):
        blocks = _singletons(group)
        pairs = sum(terms.value([[group[0]], [q]]) for q in group[1:])
        deficit = entries.term(blocks, terms.value(blocks) - pairs, prefix="deficit")
        partition = Partition.of(blocks)
        entries.flag(f"standard_{partition.snake_label()}", f"standard:{partition.label()}",
                     deficit >= -general.tolerance)
    return _report(terms, "deficit_ordering", standard.margin, general.margin,
                   general.tolerance, entries)


def second_class_audit(rho: DensityMatrix, spec: AuditSpec,
                       cfg: Optional[OptimizerConfig] = None,
                       terms: Optional[DiscordTerms] = None,
                       check_conditions: bool = True) -> AuditReport:
    """D(A_1:...:A_N) - sum_i D(A_i..A_i+K-1 : A_i+K) against D(A_1:...:A_K)."""
    terms = _terms_for(rho, cfg, terms)
    _require_parties(terms, 2)
    spec.check_register(terms.n_parties)
    n, window = terms.n_parties, spec.window
    tol = spec.tolerance + OPTIMIZER_NOISE_BUDGET
    total = terms.total().value
    entries = _Entries()
    entries.term(terms.total_blocks, total)
    sliding = 0.0
    for i in range(n - window):
        blocks = [list(range(i, i + window)), [i + window]]
        sliding += entries.term(blocks, terms.value(blocks))
    rhs = 0.0
    if window > 1:
        head = _singletons(range(window))
        rhs = entries.term(head, terms.value(head))

    if check_conditions:
        comparisons = [([list(range(j)), [j]], [list(range(j - window, j)), [j]])
                       for j in range(window + 1, n)]
        _discard_flags(terms, entries, comparisons, tol)
    return _report(terms, f"second_class_K{window}", total - sliding, rhs, tol, entries)


def residual_gqd(rho: DensityMatrix, cfg: Optional[OptimizerConfig] = None,
                 terms: Optional[DiscordTerms] = None) -> float:
    """D_R^N = D(A_1:...:A_N) - sum_K D(A_K:A_K+1) along register order.

    May be negative for thermal states; the sign is reported as computed.
    """
    report = second_class_audit(rho, AuditSpec(window=1), cfg, terms, check_conditions=False)
    return report.margin


def _check_decomposition(blocks: Blocks, n_parties: int) -> List[List[int]]:
    partition = Partition.of(blocks)
    if partition.union != tuple(range(n_parties)):
        raise PartitionError(
            f"Blocks {[list(b) for b in blocks]} do not cover a {n_parties}-party register")
    partition.require_correlation()
    return [list(block.indices) for block in partition.blocks]


def _inner_blocks(blocks: List[List[int]]) -> List[List[List[int]]]:
    return [_singletons(block) for block in blocks if len(block) > 1]


def power_inequality_check(rho: DensityMatrix, blocks: Blocks, n_pow: int,
                           cfg: Optional[OptimizerConfig] = None,
                           tolerance: float = 0.0,
                           terms: Optional[DiscordTerms] = None) -> AuditReport:
    """D_total^n against sum of block GQDs^n plus the between-blocks GQD^n.

    Negative rounding noise is clipped to zero before raising to the power.
    """
    if n_pow < 1:
        raise ConfigurationError(f"Exponent must be at least 1, got {n_pow}", key="power")
    terms = _terms_for(rho, cfg, terms)
    blocks = _check_decomposition(blocks, terms.n_parties)
    tol = tolerance + OPTIMIZER_NOISE_BUDGET
    total = terms.total().value
    entries = _Entries()
    entries.term(terms.total_blocks, total)
    rhs = 0.0
    for inner in _inner_blocks(blocks):
        rhs += max(entries.term(inner, terms.value(inner)), 0.0) ** n_pow
    between = entries.term(blocks, terms.value(blocks))
    rhs += max(between, 0.0) ** n_pow
    return _report(terms, f"power_n{n_pow}", max(total, 0.0) ** n_pow, rhs, tol, entries)


def lower_bound_report(rho: DensityMatrix, blocks: Blocks,
                       cfg: Optional[OptimizerConfig] = None,
                       tolerance: float = 0.0,
                       terms: Optional[DiscordTerms] = None) -> List[AuditReport]:
    """Total GQD against the sum of block GQDs, and against the between-blocks GQD."""
    terms = _terms_for(rho, cfg, terms)
    blocks = _check_decomposition(blocks, terms.n_parties)
    tol = tolerance + OPTIMIZER_NOISE_BUDGET
    total = terms.total().value
    inner_entries = _Entries()
    inner_entries.term(terms.total_blocks, total)
    inner_sum = sum(inner_entries.term(b, terms.value(b)) for b in _inner_blocks(blocks))
    between_entries = _Entries()
    between_entries.term(terms.total_blocks, total)
    between = between_entries.term(blocks, terms.value(blocks))
    return [
        _report(terms, "lower_bound_blocks", total, inner_sum, tol, inner_entries),
        _report(terms, "lower_bound_between", total, between, tol, between_entries),
    ]


def blocks_from_cuts(n_parties: int, cuts: Sequence[int]) -> List[List[int]]:
    """Contiguous blocks split after each cut, e.g. (4, [2]) -> [[0, 1], [2, 3]]."""
    bounds = [0] + list(cuts) + [n_parties]
    if any(b <= a for a, b in zip(bounds, bounds[1:])):
        raise ConfigurationError(
            f"cuts {list(cuts)} must be strictly increasing inside (0, {n_parties})", key="cuts")
    return [list(range(a, b)) for a, b in zip(bounds, bounds[1:])]


def identity_report(rho: DensityMatrix, angles: AngleSet,
                    mode: IdentityMode = IdentityMode.TELESCOPING,
                    cuts: Sequence[int] = (),
                    blocks: Optional[Blocks] = None) -> AuditReport:
    """Evaluate a loss-of-correlation identity with every term under the same measurement.

    telescoping: D_Phi(A_1:...:A_N) = sum_k D_Phi(A_1..A_k : A_k+1).
    block: D_Phi(total) = sum of D_Phi inside each block + D_Phi between the blocks.
    """
    n = rho.n_qubits
    if n < 2:
        raise ConfigurationError("Identity audits need at least two parties", key="n")

    def loss(term: Blocks) -> float:
        return CorrelationLoss(rho, Partition.of(term)).at(angles)

    total_blocks = _singletons(range(n))
    entries = _Entries()
    lhs = entries.term(total_blocks, loss(total_blocks))
    if mode == IdentityMode.TELESCOPING:
        terms = [[list(range(k)), [k]] for k in range(1, n)]
    else:
        if blocks is None:
            if not cuts:
                raise ConfigurationError("Block identity needs cuts or blocks", key="cuts")
            blocks = blocks_from_cuts(n, cuts)
        blocks = _check_decomposition(blocks, n)
        terms = _inner_blocks(blocks) + [blocks]
    rhs = 0.0
    for term in terms:
        rhs += entries.term(term, loss(term))
    report = AuditReport.build(f"identity_{mode.value}", lhs, rhs, IDENTITY_TOLERANCE,
                               holds=abs(lhs - rhs) < IDENTITY_TOLERANCE,
                               components=entries.components, labels=entries.labels)
    if not report.holds:
        logger.warning("Identity residual above tolerance", mode=mode.value,
                       residual=abs(report.margin))
    return report


def identity_audit(rho: DensityMatrix, angles: AngleSet,
                   mode: IdentityMode = IdentityMode.TELESCOPING,
                   cuts: Sequence[int] = (),
                   blocks: Optional[Blocks] = None) -> float:
    """Absolute residual |lhs - sum of terms| of identity_report."""
    return abs(identity_report(rho, angles, mode, cuts, blocks).margin)


CLOSED_FORM_TOLERANCE = 5e-3


def mixed_w_closed_form_report(rho: DensityMatrix, mu: float,
                               cfg: Optional[OptimizerConfig] = None,
                               terms: Optional[DiscordTerms] = None) -> AuditReport:
    """Numeric residual GQD of a mixed W state against the printed closed form.

    The computational-basis residual and both brackets are reported as components;
    a disagreement beyond CLOSED_FORM_TOLERANCE is logged as a finding.
    """
    terms = _terms_for(rho, cfg, terms)
    n = terms.n_parties
    numeric = residual_gqd(rho, terms=terms)
    printed = mixed_w_residual_closed_form(n, mu)
    brackets = mixed_w_brackets(n, mu)
    components = {
        "fixed_basis": mixed_w_residual_fixed_basis(n, mu),
        "bracket_total": brackets.total,
        "bracket_pair": brackets.pair,
        "numeric_total": terms.total().value,
    }
    report = AuditReport.build("mixed_w_closed_form", numeric, printed, CLOSED_FORM_TOLERANCE,
                               holds=abs(numeric - printed) <= CLOSED_FORM_TOLERANCE,
                               components=components, converged=terms.converged)
    if not report.holds:
        terms.log.warning("Residual GQD differs from the closed form", mu=mu,
                          numeric=numeric, closed_form=printed,
                          fixed_basis=components["fixed_basis"])
    return report
