"""Command line entry point: ``relaylab analyze|simulate|sweep|fig|selfcheck``.

Exit codes: 0 success, 1 failed selfcheck, 2 configuration error, 3 quadrature
non-convergence, 4 upper-bound violation found by ``sweep --check``.
"""

import logging
from pathlib import Path
from typing import Callable, Optional

import typer
from pydantic import ValidationError

from relaylab.analysis import ChiTail
from relaylab.constants import RESULTS_PATH
from relaylab.exceptions import ConfigurationError, DomainError, NonConvergenceError
from relaylab.harness import (
    ExperimentConfig,
    FigureName,
    FigureOverrides,
    ResultRow,
    compare_report,
    emit_csv,
    fig_data,
    load_config,
    required_snr_summary,
    run_selfcheck,
    run_sweep,
)
from relaylab.relay_logger import get_logger, setup_logging
from relaylab.simulation import Combining
from relaylab.util import get_timestamp_suffix

logger = get_logger(__name__)

EXIT_SELFCHECK = 1
EXIT_CONFIG = 2
EXIT_NONCONVERGENCE = 3
EXIT_BOUND_VIOLATION = 4

app = typer.Typer(
    help="Outage, throughput and Monte Carlo analysis of HARQ with opportunistic relay selection.",
    no_args_is_help=True,
    add_completion=False,
)

ConfigOption = typer.Option(..., "--config", "-c", exists=True, dir_okay=False, help="Experiment config file.")
OutOption = typer.Option(None, "--out", "-o", help="CSV output path; defaults to results/<command>_<timestamp>.csv.")
SeedOption = typer.Option(None, "--seed", min=0, help="Simulation seed.")
TrialsOption = typer.Option(None, "--trials", min=1, help="Packets per SNR point.")
ChiTailOption = typer.Option(None, "--chi-tail", help="Count of the relay-silent tail term.")
CombiningOption = typer.Option(None, "--combining", help="Source and relay transmission once the relay decoded.")
TimingOption = typer.Option(False, "--timing", help="Record wall time per row instead of 0.")


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging."),
    log_file: bool = typer.Option(False, "--log-file", help="Also log to a rotating file under the log directory."),
) -> None:
    setup_logging(level=logging.DEBUG if verbose else logging.INFO, log_to_file=log_file, force=True)


def _guarded(action: Callable[[], int]) -> None:
    """Run a command body and map library errors to exit codes."""
    try:
        code = action()
    except (ConfigurationError, DomainError, ValidationError) as exc:
        typer.echo(f"Configuration error: {exc}", err=True)
        raise typer.Exit(EXIT_CONFIG) from exc
    except NonConvergenceError as exc:
        typer.echo(f"Quadrature did not converge: {exc} (best estimate {exc.best_estimate:.6g})", err=True)
        raise typer.Exit(EXIT_NONCONVERGENCE) from exc
    if code:
        raise typer.Exit(code)


def _output_path(command: str, out: Optional[Path], cfg: Optional[ExperimentConfig] = None) -> Path:
    if out is not None:
        return out
    if cfg is not None and cfg.output_path is not None:
        return cfg.output_path
    return RESULTS_PATH / f"{command}_{get_timestamp_suffix()}.csv"


def _write(rows: list[ResultRow], path: Path) -> int:
    emit_csv(rows, path)
    typer.echo(f"{len(rows)} rows -> {path}")
    if any(not row.converged for row in rows):
        typer.echo("Some rows hold non-converged quadrature estimates", err=True)
        return EXIT_NONCONVERGENCE
    return 0


@app.command()
def analyze(
    config: Path = ConfigOption,
    chi_tail: Optional[ChiTail] = ChiTailOption,
    out: Optional[Path] = OutOption,
    timing: bool = TimingOption,
) -> None:
    """Evaluate the analytical outage (and throughput) formulas over the config grid."""

    def action() -> int:
        cfg = load_config(config).with_overrides(chi_tail=chi_tail, sim_enabled=False, timing=timing or None)
        return _write(run_sweep(cfg), _output_path("analyze", out, cfg))

    _guarded(action)


@app.command()
def simulate(
    config: Path = ConfigOption,
    seed: Optional[int] = SeedOption,
    trials: Optional[int] = TrialsOption,
    combining: Optional[Combining] = CombiningOption,
    out: Optional[Path] = OutOption,
    timing: bool = TimingOption,
) -> None:
    """Monte Carlo outage estimates over the config grid."""

    def action() -> int:
        cfg = load_config(config).with_overrides(
            seed=seed, trials=trials, combining=combining, sim_enabled=True, timing=timing or None
        )
        return _write(run_sweep(cfg, include_analysis=False), _output_path("simulate", out, cfg))

    _guarded(action)


@app.command()
def sweep(
    config: Path = ConfigOption,
    seed: Optional[int] = SeedOption,
    trials: Optional[int] = TrialsOption,
    chi_tail: Optional[ChiTail] = ChiTailOption,
    combining: Optional[Combining] = CombiningOption,
    out: Optional[Path] = OutOption,
    timing: bool = TimingOption,
    check: bool = typer.Option(False, "--check", help="Exit with code 4 if the simulation breaks the upper bound."),
) -> None:
    """Analysis and simulation together, followed by the z-score comparison."""

    def action() -> int:
        cfg = load_config(config).with_overrides(
            seed=seed,
            trials=trials,
            chi_tail=chi_tail,
            combining=combining,
            sim_enabled=True,
            timing=timing or None,
        )
        rows = run_sweep(cfg)
        code = _write(rows, _output_path("sweep", out, cfg))
        report = compare_report(rows)
        typer.echo(report.summary.to_string(index=False))
        typer.echo(f"Upper-bound violations: {report.bound_violations}")
        if check and report.bound_violations:
            return EXIT_BOUND_VIOLATION
        return code

    _guarded(action)


@app.command()
def fig(
    name: FigureName = typer.Argument(..., help="Figure to generate."),
    config: Optional[Path] = typer.Option(
        None, "--config", "-c", exists=True, dir_okay=False, help="Experiment file replacing the figure defaults."
    ),
    n_relays: Optional[list[int]] = typer.Option(None, "--n-relays", "-n", help="Relay counts (repeatable)."),
    seed: Optional[int] = SeedOption,
    trials: Optional[int] = TrialsOption,
    chi_tail: Optional[ChiTail] = ChiTailOption,
    combining: Optional[Combining] = CombiningOption,
    simulate: bool = typer.Option(True, "--sim/--no-sim", help="Add the simulation overlay."),
    out: Optional[Path] = OutOption,
    timing: bool = TimingOption,
) -> None:
    """Rows of one published figure with its default settings, or those of an experiment file."""

    def action() -> int:
        cfg = load_config(config) if config is not None else None
        base = FigureOverrides.from_config(cfg, simulate) if cfg is not None else FigureOverrides(simulate=simulate)
        flags = {
            "n_relays": tuple(n_relays) if n_relays else None,
            "seed": seed,
            "trials": trials,
            "chi_tail": chi_tail,
            "combining": combining,
            "timing": timing or None,
        }
        overrides = FigureOverrides.model_validate(
            {**base.model_dump(), **{key: value for key, value in flags.items() if value is not None}}
        )
        path = _output_path(name.value, out, cfg)
        code = _write(fig_data(name, overrides), path)
        if name == FigureName.G2_OUTAGE_SWEEP:
            summary = required_snr_summary(overrides)
            summary_path = path.with_name(f"{path.stem}_summary.csv")
            summary.to_csv(summary_path, index=False, float_format="%.6g", lineterminator="\n")
            typer.echo(summary.to_string(index=False))
            logger.info(f"Wrote required-SNR summary to {summary_path}")
        return code

    _guarded(action)


@app.command()
def selfcheck() -> None:
    """Run the fast invariant suite; exit code 1 if any check fails."""
    results = run_selfcheck()
    for result in results:
        typer.echo(f"{'ok  ' if result.passed else 'FAIL'} {result.name}: {result.detail}")
    if not all(result.passed for result in results):
        raise typer.Exit(EXIT_SELFCHECK)


if __name__ == "__main__":
    app()
