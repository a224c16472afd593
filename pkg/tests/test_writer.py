import numpy as np
import yaml

from levelset_lab.functionals import sweep
from levelset_lab.metrics import MetricModel
from levelset_lab.potentials import solve_green
from levelset_lab.runner import ReportWriter
from levelset_lab.runner.config import OutputFormat


def test_writer_respects_formats(tmp_path):
    """Only requested formats are written; the summary always is."""
    report = sweep(solve_green(MetricModel.flat()), [1.0, 2.0, 4.0])
    writer = ReportWriter(tmp_path, "flat", [OutputFormat.CSV])

    writer.write_sweep(report, "green")
    summary_path = writer.write_summary({"experiment": "flat", "passed": True})

    assert [p.name for p in writer.files] == ["flat_green.csv", "flat_summary.yaml"]
    assert not (tmp_path / "flat_green.json").exists()
    assert summary_path == writer.files[-1]


def test_summary_lists_files_written_before_it(tmp_path):
    """`files` in the summary names every earlier output."""
    writer = ReportWriter(tmp_path, "run", [OutputFormat.CSV, OutputFormat.JSON])
    writer.write_table(["t", "F"], [[1.0, 0.5], [2.0, 0.75]], "table")

    path = writer.write_summary({"passed": False})
    with open(path, encoding="utf-8") as f:
        data = yaml.safe_load(f)

    assert data["passed"] is False
    assert data["files"] == ["run_table.csv"]
    assert (tmp_path / "run_table.csv").read_text(encoding="utf-8").splitlines() == [
        "t,F",
        "1.0,0.5",
        "2.0,0.75",
    ]


def test_summary_converts_numpy_scalars(tmp_path):
    """numpy values become plain YAML numbers."""
    writer = ReportWriter(tmp_path, "np", [])
    path = writer.write_summary({"value": np.float64(1.5), "items": (np.int64(2),)})

    with open(path, encoding="utf-8") as f:
        data = yaml.safe_load(f)

    assert data == {"value": 1.5, "items": [2], "files": []}
