from pathlib import Path

import yaml
from typer.testing import CliRunner

from levelset_lab.cli import app

runner = CliRunner()

CONFIG_DIR = Path(__file__).parent.parent / "configs"

FLAT_SWEEP = """\
metric:
  kind: flat
run:
  mode: green-sweep
  derivative_check: false
  t_grid:
    num: 10
output:
  name: cli_flat
"""


def _config(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "experiment.yaml"
    path.write_text(text, encoding="utf-8")
    return path


def test_no_arguments_prints_help():
    """Invoking without a command shows the command list."""
    result = runner.invoke(app, [])

    assert "sweep" in result.output
    assert "grid3d" in result.output


def test_sweep_passes_on_flat_space(tmp_path):
    """Exit status 0 and the summary lands in --out."""
    path = _config(tmp_path, FLAT_SWEEP)
    out = tmp_path / "out"

    result = runner.invoke(app, ["sweep", "--config", str(path), "--out", str(out), "-j", "2"])

    assert result.exit_code == 0
    with open(out / "cli_flat_summary.yaml", encoding="utf-8") as f:
        assert yaml.safe_load(f)["mode"] == "green-sweep"


def test_run_uses_configured_mode(tmp_path):
    """`run` follows run.mode from the document."""
    path = _config(tmp_path, FLAT_SWEEP.replace("green-sweep", "solve"))

    result = runner.invoke(app, ["run", "-c", str(path), "-o", str(tmp_path)])

    assert result.exit_code == 0
    with open(tmp_path / "cli_flat_summary.yaml", encoding="utf-8") as f:
        assert yaml.safe_load(f)["mode"] == "solve"


def test_fit_command(tmp_path):
    """`fit` runs the expansion fits whatever run.mode says."""
    text = (CONFIG_DIR / "13_fit_expansion.yaml").read_text(encoding="utf-8")
    path = _config(tmp_path, text.replace("mode: fit", "mode: solve"))

    result = runner.invoke(app, ["fit", "-c", str(path), "-o", str(tmp_path)])

    assert result.exit_code == 0
    with open(tmp_path / "fit_expansion_summary.yaml", encoding="utf-8") as f:
        summary = yaml.safe_load(f)
    assert summary["mode"] == "fit"
    assert summary["passed"] is True


def test_invalid_config_exits_2(tmp_path):
    """Configuration errors exit with status 2."""
    path = _config(tmp_path, "metric:\n  kind: flat\n  mass: 1\nrun:\n  mode: solve\n")

    result = runner.invoke(app, ["solve", "-c", str(path), "-o", str(tmp_path)])

    assert result.exit_code == 2


def test_invalid_log_level_exits_2(tmp_path):
    """An unknown log level is a configuration error."""
    path = _config(tmp_path, FLAT_SWEEP)

    result = runner.invoke(app, ["solve", "-c", str(path), "--log-level", "LOUD"])

    assert result.exit_code == 2
    assert "Invalid log level: LOUD" in result.output


def test_negative_mass_exits_1(tmp_path):
    """Failed assertions exit with status 1."""
    result = runner.invoke(
        app,
        ["sweep", "-c", str(CONFIG_DIR / "11_negative_mass.yaml"), "-o", str(tmp_path)],
    )

    assert result.exit_code == 1


def test_solver_error_exits_3(tmp_path):
    """A Green's function on an incomplete chart cannot be solved."""
    path = _config(
        tmp_path,
        "metric:\n  kind: schwarzschild_isotropic\n  mass: 1.0\n"
        "solver:\n  exterior: false\nrun:\n  mode: solve\n",
    )

    result = runner.invoke(app, ["sweep", "-c", str(path), "-o", str(tmp_path)])

    assert result.exit_code == 3


def test_jobs_from_environment(tmp_path, monkeypatch):
    """A malformed LEVELSET_LAB_JOBS is rejected."""
    monkeypatch.setenv("LEVELSET_LAB_JOBS", "many")
    path = _config(tmp_path, FLAT_SWEEP)

    result = runner.invoke(app, ["solve", "-c", str(path), "-o", str(tmp_path)])

    assert result.exit_code != 0
    assert "LEVELSET_LAB_JOBS" in result.output
