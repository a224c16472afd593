import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

REPORT_COLUMNS = [
    "t",
    "level",
    "F",
    "flux",
    "int_grad2",
    "int_gradH",
    "gb_deficit",
    "grad_term",
    "scalar_term",
    "traceless_term",
    "sphere_dev",
]


@dataclass(frozen=True)
class DerivativeTerms:
    """Integrated summands of F'(t); all but gauss_bonnet_deficit are nonnegative when R >= 0."""

    gauss_bonnet_deficit: float
    grad_term: float
    scalar_term: float
    traceless_term: float
    sphere_deviation: float

    @property
    def total(self) -> float:
        return (
            self.gauss_bonnet_deficit
            + self.grad_term
            + self.scalar_term
            + self.traceless_term
            + self.sphere_deviation
        )


@dataclass(frozen=True)
class LevelSetSample:
    t: float
    level: float
    F_value: float
    flux: float
    int_grad2: float
    int_gradH: float
    p_exponent: float = 2.0
    euler_char: int = 2
    coord_radius: float | None = None
    derivative_terms: DerivativeTerms | None = None

    def __post_init__(self):
        if self.t <= 0:
            raise ValueError(f"Invalid t: {self.t}. Must be positive")

        if isinstance(self.derivative_terms, dict):
            object.__setattr__(
                self, "derivative_terms", DerivativeTerms(**self.derivative_terms)
            )

    @property
    def gauss_bonnet_deficit(self) -> float:
        """4 pi - integral of R^Sigma/2 = 4 pi - 2 pi chi by Gauss-Bonnet."""
        if self.derivative_terms is not None:
            return self.derivative_terms.gauss_bonnet_deficit
        return 4.0 * np.pi - 2.0 * np.pi * self.euler_char

    def row(self) -> list[float]:
        terms = self.derivative_terms
        nan = float("nan")
        return [
            self.t,
            self.level,
            self.F_value,
            self.flux,
            self.int_grad2,
            self.int_gradH,
            self.gauss_bonnet_deficit,
            terms.grad_term if terms else nan,
            terms.scalar_term if terms else nan,
            terms.traceless_term if terms else nan,
            terms.sphere_deviation if terms else nan,
        ]


@dataclass(frozen=True)
class Violation:
    t_lo: float
    t_hi: float
    F_lo: float
    F_hi: float
    tolerance: float

    @property
    def drop(self) -> float:
        return self.F_lo - self.F_hi


@dataclass(frozen=True)
class SkippedLevel:
    t: float
    reason: str


@dataclass
class MonotonicityReport:
    samples: list[LevelSetSample]
    tolerance: float
    violations: list[Violation] = field(default_factory=list)
    skipped: list[SkippedLevel] = field(default_factory=list)
    limit_estimate: float | None = None
    initial_value: float | None = None
    p_exponent: float = 2.0

    def __post_init__(self):
        self.samples = [
            s if isinstance(s, LevelSetSample) else LevelSetSample(**s)
            for s in self.samples
        ]
        self.violations = [
            v if isinstance(v, Violation) else Violation(**v) for v in self.violations
        ]
        self.skipped = [
            s if isinstance(s, SkippedLevel) else SkippedLevel(**s)
            for s in self.skipped
        ]

        ts = [s.t for s in self.samples]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("Invalid samples: must be sorted by strictly increasing t")

        if self.tolerance < 0:
            raise ValueError(f"Invalid tolerance: {self.tolerance}. Must be nonnegative")

    @property
    def is_monotone(self) -> bool:
        return not self.violations

    @property
    def t_values(self) -> list[float]:
        return [s.t for s in self.samples]

    @property
    def F_values(self) -> list[float]:
        return [s.F_value for s in self.samples]

    def summary(self) -> dict[str, object]:
        return {
            "p": self.p_exponent,
            "num_samples": len(self.samples),
            "tolerance": self.tolerance,
            "limit_estimate": self.limit_estimate,
            "initial_value": self.initial_value,
            "num_violations": len(self.violations),
            "violations": [asdict(v) | {"drop": v.drop} for v in self.violations],
            "skipped": [asdict(s) for s in self.skipped],
        }

    def export_csv(self, dest_dir: str | Path, filename: str) -> Path:
        if not isinstance(dest_dir, Path):
            dest_dir = Path(dest_dir)

        dest_dir.mkdir(parents=True, exist_ok=True)
        filepath: Path = dest_dir / f"{filename}.csv"

        with open(filepath, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(REPORT_COLUMNS)
            for sample in self.samples:
                writer.writerow([repr(float(v)) for v in sample.row()])

        return filepath

    def save_to_json(
        self, dest_dir: str | Path, filename: str, indent: int = 4
    ) -> None:
        """Save a MonotonicityReport object to a JSON file"""
        if not isinstance(dest_dir, Path):
            dest_dir = Path(dest_dir)

        # Create the destination directory if it doesn't already exist
        dest_dir.mkdir(parents=True, exist_ok=True)

        filepath: Path = dest_dir / f"{filename}.json"

        with open(filepath, "w") as f:
            json.dump(asdict(self), f, indent=indent)

    @classmethod
    def load_from_json(
        cls, source_dir: str | Path, filename: str
    ) -> "MonotonicityReport":
        """Load a MonotonicityReport object from a JSON file"""
        if not isinstance(source_dir, Path):
            source_dir = Path(source_dir)

        filepath: Path = source_dir / f"{filename}.json"

        with open(filepath, "r") as f:
            report_data = json.load(f)

        return cls(**report_data)


@dataclass(frozen=True)
class DerivativeCheck:
    t: float
    lhs: float
    rhs: float
    relerr: float
