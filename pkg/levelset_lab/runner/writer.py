from pathlib import Path
from typing import Any

import numpy as np
import yaml

from ..functionals import MonotonicityReport
from ..grid3d import ConformalField, ExtractedSurface
from ..identities import (
    IdentitySample,
    IntegralCheck,
    export_identity_csv,
    save_identity_json,
)
from ..logging_config import get_logger
from ..mass import MassReport
from ..potentials import PotentialSolution
from .config import OutputFormat

logger = get_logger(__name__)


def _plain(value: Any) -> Any:
    """numpy scalars and containers to YAML-safe builtins."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    return value


class ReportWriter:
    """
    Single sink for every file of one experiment. Callers hand over finished
    results in the order they should appear; `files` lists what was written.
    """

    def __init__(
        self, dest_dir: str | Path, name: str, formats: list[OutputFormat]
    ) -> None:
        if not isinstance(dest_dir, Path):
            dest_dir = Path(dest_dir)

        self._dest_dir = dest_dir
        self._name = name
        self._formats = set(formats)
        self.files: list[Path] = []

    @property
    def dest_dir(self) -> Path:
        return self._dest_dir

    def _stem(self, tag: str) -> str:
        return f"{self._name}_{tag}" if tag else self._name

    def _record(self, path: Path) -> Path:
        logger.debug("Wrote %s", path)
        self.files.append(path)
        return path

    def wants(self, fmt: OutputFormat) -> bool:
        return fmt in self._formats

    def write_solution(self, sol: PotentialSolution, tag: str) -> None:
        if self.wants(OutputFormat.CSV):
            self._record(sol.export_csv(self._dest_dir, self._stem(tag)))

    def write_sweep(self, report: MonotonicityReport, tag: str) -> None:
        stem = self._stem(tag)
        if self.wants(OutputFormat.CSV):
            self._record(report.export_csv(self._dest_dir, stem))
        if self.wants(OutputFormat.JSON):
            report.save_to_json(self._dest_dir, stem)
            self._record(self._dest_dir / f"{stem}.json")

    def write_mass(self, report: MassReport, tag: str) -> None:
        stem = self._stem(tag)
        if self.wants(OutputFormat.CSV) and report.penrose:
            self._record(report.export_csv(self._dest_dir, stem))
        if self.wants(OutputFormat.JSON):
            report.save_to_json(self._dest_dir, stem)
            self._record(self._dest_dir / f"{stem}.json")

    def write_identities(
        self, samples: list[IdentitySample], integrals: list[IntegralCheck], tag: str
    ) -> None:
        stem = self._stem(tag)
        if self.wants(OutputFormat.CSV):
            self._record(export_identity_csv(samples, self._dest_dir, stem))
        if self.wants(OutputFormat.JSON):
            save_identity_json(samples, integrals, self._dest_dir, stem)
            self._record(self._dest_dir / f"{stem}.json")

    def write_surface(self, surface: ExtractedSurface, tag: str) -> None:
        if self.wants(OutputFormat.OFF):
            self._record(surface.export_off(self._dest_dir, self._stem(tag)))

    def write_field(self, conformal_field: ConformalField, tag: str) -> None:
        if self.wants(OutputFormat.RAW):
            for path in conformal_field.save_raw(self._dest_dir, self._stem(tag)):
                self._record(path)

    def write_table(self, header: list[str], rows: list[list[float]], tag: str) -> Path:
        """Plain comma-separated table with repr floats."""
        self._dest_dir.mkdir(parents=True, exist_ok=True)
        path = self._dest_dir / f"{self._stem(tag)}.csv"
        with open(path, "w", encoding="utf-8") as f:
            f.write(",".join(header) + "\n")
            for row in rows:
                f.write(",".join(repr(float(v)) for v in row) + "\n")
        return self._record(path)

    def write_summary(self, summary: dict[str, Any]) -> Path:
        """The machine-readable summary; always written, always last."""
        self._dest_dir.mkdir(parents=True, exist_ok=True)
        path = self._dest_dir / f"{self._name}_summary.yaml"
        summary = dict(summary)
        summary["files"] = [p.name for p in self.files]
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump(_plain(summary), f, sort_keys=False)
        return self._record(path)
