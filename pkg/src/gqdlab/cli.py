"""Command-line interface for gqdlab."""

import json
import logging
import sys
from functools import wraps
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import click
import numpy as np
import structlog
from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel
from rich.progress import BarColumn, Progress, SpinnerColumn, TaskProgressColumn, TextColumn
from rich.table import Table

from .core.config import get_settings
from .core.exceptions import ConfigurationError, GqdLabError
from .core.models import (
    AngleSet,
    AuditKind,
    AuditSpec,
    IdentityMode,
    IsingSweepConfig,
    MixtureSweepConfig,
    OptimizerConfig,
    OutputFormat,
    Partition,
    RunCommand,
    RunConfig,
    StateFamily,
    SweepRecord,
)
from .discord import gqd, monotonicity_condition_audit, mutual_information
from .ising import (
    DEFAULT_FIELD_GRID,
    build_hamiltonian,
    energy,
    gibbs_state,
    ground_state,
    symmetric_gqd_scan,
    translation_defect,
    transverse_magnetization,
)
from .monogamy import (
    DiscordTerms,
    blocks_from_cuts,
    deficit_ordering,
    general_deficit,
    identity_report,
    lower_bound_report,
    mixed_w_closed_form_report,
    power_inequality_check,
    second_class_audit,
    standard_deficit,
)
from .processors.shape import summarize_sweep
from .processors.writer import write_csv, write_json
from .qstate import DensityMatrix, partial_trace, von_neumann_entropy
from .states import make_state
from .sweeps import IsingRingSweep, MixtureSweep


logger = structlog.get_logger(__name__)
console = Console(stderr=True)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2

DEFAULT_MU_GRID = [float(v) for v in np.linspace(0.0, 1.0, 21)]


def _configure_logging(level: str) -> None:
    logging.basicConfig(stream=sys.stderr, level=getattr(logging, level), format="%(message)s",
                        force=True)
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            structlog.processors.JSONRenderer()
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )


@click.group()
@click.option('--verbose', '-v', is_flag=True, help='Enable verbose logging')
@click.option('--quiet', '-q', is_flag=True, help='Suppress all output except errors')
@click.pass_context
def cli(ctx: click.Context, verbose: bool, quiet: bool):
    """gqdlab: global quantum discord, monogamy audits and Ising sweeps."""
    if quiet:
        level = 'ERROR'
    elif verbose:
        level = 'DEBUG'
    else:
        level = get_settings().log_level.upper()
    _configure_logging(level)
    console.quiet = quiet
    ctx.obj = {'quiet': quiet}


def run_options(command: Callable) -> Callable:
    """Flags shared by the state-info, gqd, audit and sweep commands."""
    options = [
        click.option('--config', 'config_path', type=click.Path(dir_okay=False),
                     help='JSON file of run settings; flags override its keys'),
        click.option('--family', type=click.Choice([f.value for f in StateFamily]),
                     help='State family'),
        click.option('--n', 'n', type=int, help='Number of qubits'),
        click.option('--mu', type=float, help='Mixing weight of the pure state'),
        click.option('--rank', type=int, help='Rank of a random state'),
        click.option('--L', 'L', type=int, help='Ising ring length (instead of --family)'),
        click.option('--J', 'J', type=float, help='Ising coupling'),
        click.option('--B', 'B', type=float, help='Transverse field'),
        click.option('--T', 'T', type=float, help='Temperature in units of J (0 = ground state)'),
        click.option('--K', 'K', type=int, help='Window size of the second-class inequality'),
        click.option('--cuts', help='Comma-separated cut points, e.g. 3 or 2,4'),
        click.option('--power', type=int, help='Exponent of the power inequality'),
        click.option('--blocks', help="Qubit blocks, e.g. '0,1|2,3'"),
        click.option('--grid', help="Sweep grid 'start:stop:count' or 'a,b,c'"),
        click.option('--audit', type=click.Choice([k.value for k in AuditKind]),
                     help='Audit to run'),
        click.option('--mode', type=click.Choice([m.value for m in IdentityMode]),
                     help='Identity audit mode'),
        click.option('--samples', type=int, help='Number of seeded random states to audit'),
        click.option('--ring-bonds/--open-bonds', 'ring_bonds', default=None,
                     help='Include the closing bond of the ring in nearest-neighbor sums'),
        click.option('--threads', type=int, help='Worker threads (default: GQDLAB_THREADS)'),
        click.option('--seed', type=int, help='Seed for random states and optimizer starts'),
        click.option('--out', type=click.Path(dir_okay=False), help='Output file path'),
        click.option('--format', 'format', type=click.Choice([f.value for f in OutputFormat]),
                     help='Output format'),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _config_error(error: ValidationError, default_key: str) -> ConfigurationError:
    """ConfigurationError naming the first offending key of a validation error."""
    first = error.errors()[0]
    key = ".".join(str(part) for part in first["loc"]) or default_key
    return ConfigurationError(f"Invalid value for '{key}': {first['msg']}", key=key)


def load_run_config(command: RunCommand, flags: Dict[str, Any],
                    config_path: Optional[str] = None) -> RunConfig:
    """Merge defaults, config-file keys and explicit flags into a RunConfig."""
    data: Dict[str, Any] = {}
    if config_path:
        try:
            data = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"Cannot read config file {config_path}: {e}", key="config")
        if not isinstance(data, dict):
            raise ConfigurationError("Config file must hold a JSON object", key="config")
    data.update({key: value for key, value in flags.items() if value is not None})
    data.setdefault("threads", get_settings().threads)
    data["command"] = command.value
    try:
        return RunConfig(**data)
    except ValidationError as e:
        raise _config_error(e, "config")


def _command(name: RunCommand):
    """Turn raw click flags into a RunConfig before calling the command body."""
    def decorator(body: Callable[[RunConfig], int]) -> Callable:
        @wraps(body)
        def wrapper(config_path: Optional[str], **flags: Any) -> int:
            config = load_run_config(name, flags, config_path)
            logger.debug("Run configuration", command=name.value,
                         config=config.model_dump(mode="json", exclude={"optimizer"}))
            return body(config)
        return wrapper
    return decorator


def _ising_state(config: RunConfig, field: Optional[float] = None
                 ) -> Tuple[DensityMatrix, Dict[str, Any]]:
    spec = config.hamiltonian_spec(field)
    hamiltonian = build_hamiltonian(spec)
    info: Dict[str, Any] = {"L": spec.L, "J": spec.J, "B": spec.B, "T": config.T}
    if config.T == 0:
        ground = ground_state(hamiltonian)
        rho = ground.state
        info.update(energy=ground.energy, gap=ground.gap)
    else:
        rho = gibbs_state(hamiltonian, config.thermal_spec())
        info.update(energy=energy(rho, hamiltonian))
    info.update(transverse_magnetization=transverse_magnetization(rho),
                translation_defect=translation_defect(rho))
    return rho, info


def build_state(config: RunConfig, seed: Optional[int] = None
                ) -> Tuple[DensityMatrix, str, Dict[str, Any]]:
    """The state a RunConfig names, its label and family-specific details."""
    if config.L is not None:
        rho, info = _ising_state(config)
        label = f"ising(L={config.L}, B/J={config.B / config.J:g}, T={config.T:g})"
        return rho, label, info
    try:
        spec = config.state_spec(seed)
    except ValidationError as e:
        raise _config_error(e, "n")
    return make_state(spec), spec.label(), {}


def _partition(config: RunConfig, n_qubits: int) -> Partition:
    if config.blocks:
        partition = Partition.of(config.blocks)
        partition.check_register(n_qubits)
        return partition
    return Partition.singletons(n_qubits)


def _angles_payload(angles: AngleSet) -> Dict[str, List[float]]:
    return {"theta": angles.thetas, "phi": angles.phis}


@cli.command('state-info')
@run_options
@_command(RunCommand.STATE_INFO)
def state_info(config: RunConfig) -> int:
    """Show trace, purity, spectrum and entropies of a state."""
    rho, label, info = build_state(config)
    payload: Dict[str, Any] = {
        "command": "state-info",
        "state": label,
        "n_qubits": rho.n_qubits,
        "trace": float(np.real(np.trace(rho.matrix))),
        "purity": rho.purity(),
        "entropy": von_neumann_entropy(rho),
        "spectrum": sorted(rho.eigenvalues().tolist(), reverse=True),
        "marginal_entropies": [von_neumann_entropy(partial_trace(rho, [q]))
                               for q in range(rho.n_qubits)],
        "mutual_information": (mutual_information(rho, Partition.singletons(rho.n_qubits))
                               if rho.n_qubits > 1 else None),
        **info,
    }
    write_json(payload, config.out)

    table = Table(title=f"State {label}")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", justify="right", style="magenta")
    for key in ("trace", "purity", "entropy", "mutual_information"):
        if payload[key] is not None:
            table.add_row(key, f"{payload[key]:.6f}")
    console.print(table)
    return EXIT_OK


@cli.command('gqd')
@run_options
@_command(RunCommand.GQD)
def gqd_command(config: RunConfig) -> int:
    """Minimize the loss of correlation over product projective measurements."""
    rho, label, info = build_state(config)
    partition = _partition(config, rho.n_qubits)
    cfg = config.optimizer_config()
    payload: Dict[str, Any] = {"command": "gqd", "state": label, **info}

    warm: List[AngleSet] = []
    if config.L is not None and partition.is_singleton and len(partition.blocks) == rho.n_qubits:
        scan = symmetric_gqd_scan(rho)
        warm.append(AngleSet.uniform(rho.n_qubits, scan.theta_bar))
        payload["symmetric_scan"] = {"value": scan.value, "theta_bar": scan.theta_bar}

    result = gqd(rho, partition, cfg, warm_starts=warm)
    payload.update(
        partition=partition.label(),
        value=result.value,
        argmin=_angles_payload(result.argmin),
        evaluations=result.evaluations,
        converged=result.converged,
        starts=result.starts,
        best_start=result.best_start,
        mutual_information=mutual_information(rho, partition),
        seed=config.seed,
        optimizer=cfg.model_dump(exclude={"threads"}),
    )
    write_json(payload, config.out)

    status = "[green]converged[/green]" if result.converged else "[red]not converged[/red]"
    console.print(Panel(f"{partition.label()} = {result.value:.9f} bits ({status})",
                        title=f"GQD of {label}", border_style="blue"))
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def _require_blocks(config: RunConfig, n_qubits: int) -> List[List[int]]:
    if config.blocks:
        return config.blocks
    if config.cuts:
        return blocks_from_cuts(n_qubits, config.cuts)
    raise ConfigurationError("This audit needs --blocks or --cuts", key="blocks")


def _identity_angles(n_qubits: int, seed: int) -> AngleSet:
    rng = np.random.default_rng(seed)
    thetas = rng.uniform(0.0, np.pi / 2, n_qubits)
    phis = rng.uniform(0.0, np.pi, n_qubits)
    return AngleSet(pairs=list(zip(thetas.tolist(), phis.tolist())))


def run_audit(kind: AuditKind, rho: DensityMatrix, config: RunConfig,
              cfg: OptimizerConfig, seed: int) -> List[Dict[str, Any]]:
    """Run one audit kind on one state; each report is returned as a plain dict."""
    try:
        spec: AuditSpec = config.audit_spec()
    except ValidationError as e:
        raise _config_error(e, "cuts")
    if kind in (AuditKind.GENERAL, AuditKind.SECOND_CLASS, AuditKind.ORDERING):
        spec.check_register(rho.n_qubits)
    terms = DiscordTerms(rho, cfg)
    if kind == AuditKind.STANDARD:
        reports = [standard_deficit(rho, tolerance=spec.tolerance, terms=terms)]
    elif kind == AuditKind.GENERAL:
        reports = [general_deficit(rho, spec, terms=terms)]
    elif kind == AuditKind.SECOND_CLASS:
        reports = [second_class_audit(rho, spec, terms=terms)]
    elif kind == AuditKind.RESIDUAL:
        report = second_class_audit(rho, AuditSpec(window=1, tolerance=spec.tolerance),
                                    terms=terms, check_conditions=False)
        reports = [report.model_copy(update={"name": "residual_gqd"})]
    elif kind == AuditKind.POWER:
        reports = [power_inequality_check(rho, _require_blocks(config, rho.n_qubits),
                                          config.power, tolerance=spec.tolerance, terms=terms)]
    elif kind == AuditKind.ORDERING:
        reports = [deficit_ordering(rho, spec, terms=terms)]
    elif kind == AuditKind.LOWER_BOUND:
        reports = lower_bound_report(rho, _require_blocks(config, rho.n_qubits),
                                     tolerance=spec.tolerance, terms=terms)
    elif kind == AuditKind.CLOSED_FORM:
        if config.family != StateFamily.MIXED_W:
            raise ConfigurationError("The closed-form audit needs the mixed-w family", key="family")
        reports = [mixed_w_closed_form_report(rho, config.mu, terms=terms)]
    elif kind == AuditKind.IDENTITY:
        angles = _identity_angles(rho.n_qubits, seed)
        report = identity_report(rho, angles, config.mode, config.cuts, config.blocks)
        return [{**report.model_dump(mode="json"), "residual": abs(report.margin),
                 "angles": _angles_payload(angles)}]
    elif kind == AuditKind.MONOTONICITY:
        monotonicity = monotonicity_condition_audit(
            rho, Partition.singletons(rho.n_qubits), cfg, spec.tolerance)
        return [{"name": "monotonicity", **monotonicity.model_dump(mode="json")}]
    else:
        raise ConfigurationError(f"Unknown audit {kind!r}", key="audit")
    return [report.model_dump(mode="json") for report in reports]


@cli.command('audit')
@run_options
@_command(RunCommand.AUDIT)
def audit_command(config: RunConfig) -> int:
    """Evaluate a monogamy inequality or identity; violations are findings, not errors."""
    cfg = config.optimizer_config()
    seeds = [config.seed]
    if config.family == StateFamily.RANDOM:
        seeds = list(range(config.seed, config.seed + config.samples))
    elif config.samples > 1:
        logger.warning("Ignoring --samples for a deterministic state family",
                       samples=config.samples)

    reports: List[Dict[str, Any]] = []
    for seed in seeds:
        rho, label, _ = build_state(config, seed)
        for report in run_audit(config.audit, rho, config, cfg, seed):
            report["state"] = label
            reports.append(report)

    write_json({"command": "audit", "audit": config.audit.value, "reports": reports},
               config.out)

    table = Table(title=f"Audit: {config.audit.value}")
    table.add_column("State", style="cyan")
    table.add_column("Report", style="blue")
    table.add_column("Margin", justify="right", style="magenta")
    table.add_column("Holds", justify="center")
    for report in reports:
        margin = report.get("margin")
        table.add_row(report["state"], report["name"],
                      "-" if margin is None else f"{margin:.3e}",
                      "yes" if report.get("holds", report.get("condition_holds")) else "no")
    console.print(table)
    return EXIT_OK


def _sweep_driver(config: RunConfig, cfg: OptimizerConfig):
    if config.L is not None:
        grid = config.grid if config.grid is not None else DEFAULT_FIELD_GRID.tolist()
        return IsingRingSweep(IsingSweepConfig(
            name=f"ising-L{config.L}-T{config.T:g}", grid=grid, threads=config.threads,
            optimizer=cfg, ring_bonds=config.ring_bonds, L=config.L, J=config.J, T=config.T))
    grid = config.grid if config.grid is not None else DEFAULT_MU_GRID
    return MixtureSweep(MixtureSweepConfig(
        name=f"{config.family.value}-N{config.n}", grid=grid, threads=config.threads,
        optimizer=cfg, ring_bonds=config.ring_bonds, family=config.family, n_qubits=config.n))


@cli.command('sweep')
@run_options
@_command(RunCommand.SWEEP)
def sweep_command(config: RunConfig) -> int:
    """Sweep B/J of an Ising ring or mu of a Werner-GHZ / mixed-W family."""
    # sweep points run in parallel; restarts inside each point stay serial
    cfg = config.optimizer_config().model_copy(update={"threads": 1})
    driver = _sweep_driver(config, cfg)

    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TaskProgressColumn(),
        console=console
    ) as progress:
        task = progress.add_task(f"Sweeping {driver.config.name}", total=len(driver.config.grid))

        def advance(record: SweepRecord) -> None:
            progress.advance(task)

        result = driver.run(progress=advance)

    if config.output_format() == OutputFormat.CSV:
        write_csv(result.records, config.out)
    else:
        write_json({
            "command": "sweep",
            "name": result.name,
            "records": result.records,
            "summary": summarize_sweep(result.records),
            "metadata": result.metadata,
        }, config.out)

    console.print(f"{result.total_points} points, {result.error_count} failed")
    return EXIT_OK


@cli.command()
def version():
    """Show version information."""
    from . import __version__
    click.echo(f"gqdlab version {__version__}")
    return EXIT_OK


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return its exit code (0 ok, 1 usage/config/runtime, 2 not converged)."""
    try:
        result = cli.main(args=list(argv) if argv is not None else None, prog_name="gqdlab",
                          standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_ERROR
    except click.Abort:
        console.print("Operation cancelled by user")
        return EXIT_ERROR
    except ConfigurationError as e:
        console.print(f"Configuration error ({e.key or 'config'}): {e}", style="red")
        return EXIT_ERROR
    except GqdLabError as e:
        console.print(f"Error: {e}", style="red")
        return EXIT_ERROR
    return result if isinstance(result, int) else EXIT_OK


def main():
    """Main entry point for the CLI."""
    sys.exit(run())
