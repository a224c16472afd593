"""Command-line entry point: one subcommand per experiment mode."""

from pathlib import Path
from typing import Annotated

import typer

from .logging_config import setup_logging
from .runner import EXIT_CONFIG, RunMode, load_config, run_config_file
from .runner.config import env_default

app = typer.Typer(
    help="Monotone level-set functionals of Green's functions and p-capacitary potentials.",
    no_args_is_help=True,
    add_completion=False,
)

ConfigOption = Annotated[
    Path,
    typer.Option("--config", "-c", help="Experiment YAML file.", dir_okay=False),
]
OutOption = Annotated[
    Path | None,
    typer.Option("--out", "-o", help="Output directory (overrides output.directory)."),
]
JobsOption = Annotated[
    int | None,
    typer.Option("--jobs", "-j", min=1, help="Worker threads (default LEVELSET_LAB_JOBS or 1)."),
]
TolScaleOption = Annotated[
    float,
    typer.Option("--tol-scale", min=0.0, help="Multiplier applied to every asserted tolerance."),
]
LogLevelOption = Annotated[
    str | None,
    typer.Option("--log-level", help="DEBUG, INFO, WARNING or ERROR (default LEVELSET_LAB_LOG_LEVEL)."),
]


def _default_jobs() -> int:
    raw = env_default("LEVELSET_LAB_JOBS", "1")
    try:
        return max(int(raw), 1)
    except ValueError as exc:
        raise typer.BadParameter(
            f"Invalid LEVELSET_LAB_JOBS: {raw!r}. Must be a positive integer"
        ) from exc


def _execute(
    config: Path,
    mode: RunMode,
    out: Path | None,
    jobs: int | None,
    tol_scale: float,
    log_level: str | None,
) -> None:
    try:
        setup_logging(log_level)
    except ValueError as exc:
        typer.echo(str(exc), err=True)
        raise typer.Exit(EXIT_CONFIG) from exc

    code = run_config_file(
        config,
        mode=mode,
        jobs=jobs if jobs is not None else _default_jobs(),
        tol_scale=tol_scale,
        out_dir=out,
    )
    raise typer.Exit(code)


@app.command()
def solve(
    config: ConfigOption,
    out: OutOption = None,
    jobs: JobsOption = None,
    tol_scale: TolScaleOption = 1.0,
    log_level: LogLevelOption = None,
) -> None:
    """Solve the configured potentials and export their tables."""
    _execute(config, RunMode.SOLVE, out, jobs, tol_scale, log_level)


@app.command()
def sweep(
    config: ConfigOption,
    out: OutOption = None,
    jobs: JobsOption = None,
    tol_scale: TolScaleOption = 1.0,
    log_level: LogLevelOption = None,
) -> None:
    """Sweep F (or F_p when the config asks for p-sweep) over the t grid."""
    try:
        configured = load_config(config).run.mode
    except ValueError:
        # Reported with its exit status by the run itself
        configured = RunMode.GREEN_SWEEP

    mode = RunMode.P_SWEEP if configured == RunMode.P_SWEEP else RunMode.GREEN_SWEEP
    _execute(config, mode, out, jobs, tol_scale, log_level)


@app.command()
def adm(
    config: ConfigOption,
    out: OutOption = None,
    jobs: JobsOption = None,
    tol_scale: TolScaleOption = 1.0,
    log_level: LogLevelOption = None,
) -> None:
    """Compare the three ADM mass estimates."""
    _execute(config, RunMode.ADM, out, jobs, tol_scale, log_level)


@app.command()
def penrose(
    config: ConfigOption,
    out: OutOption = None,
    jobs: JobsOption = None,
    tol_scale: TolScaleOption = 1.0,
    log_level: LogLevelOption = None,
) -> None:
    """Tabulate beta_p against 2m across the configured p values."""
    _execute(config, RunMode.PENROSE, out, jobs, tol_scale, log_level)


@app.command()
def identities(
    config: ConfigOption,
    out: OutOption = None,
    jobs: JobsOption = None,
    tol_scale: TolScaleOption = 1.0,
    log_level: LogLevelOption = None,
) -> None:
    """Check the divergence identities pointwise and in integrated form."""
    _execute(config, RunMode.IDENTITIES, out, jobs, tol_scale, log_level)


@app.command()
def fit(
    config: ConfigOption,
    out: OutOption = None,
    jobs: JobsOption = None,
    tol_scale: TolScaleOption = 1.0,
    log_level: LogLevelOption = None,
) -> None:
    """Fit the far-field expansion of u and evaluate the I-form limits."""
    _execute(config, RunMode.FIT, out, jobs, tol_scale, log_level)


@app.command()
def grid3d(
    config: ConfigOption,
    out: OutOption = None,
    jobs: JobsOption = None,
    tol_scale: TolScaleOption = 1.0,
    log_level: LogLevelOption = None,
) -> None:
    """Solve on a 3D conformal grid and evaluate F on extracted level surfaces."""
    _execute(config, RunMode.GRID3D, out, jobs, tol_scale, log_level)


@app.command("run")
def run_configured(
    config: ConfigOption,
    out: OutOption = None,
    jobs: JobsOption = None,
    tol_scale: TolScaleOption = 1.0,
    log_level: LogLevelOption = None,
) -> None:
    """Run whichever mode the config's run.mode names."""
    try:
        mode = load_config(config).run.mode
    except ValueError:
        mode = RunMode.SOLVE
    _execute(config, mode, out, jobs, tol_scale, log_level)


if __name__ == "__main__":
    app()
