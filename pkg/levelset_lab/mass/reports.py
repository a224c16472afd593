import csv
import json
from dataclasses import asdict, dataclass, field
from itertools import combinations
from pathlib import Path

PENROSE_COLUMNS = [
    "p",
    "Cap_p",
    "c_p",
    "beta_p",
    "two_m",
    "F_at_beta_p",
    "lower_bound",
    "F_limit",
    "capacity_bound",
]


@dataclass(frozen=True)
class PenroseRow:
    """
    One rung of the ladder F_p(beta_p) >= 4 pi beta_p, lim F_p = 8 pi m,
    hence 2m >= beta_p, for a single exponent p.
    """

    p: float
    Cap_p: float
    c_p: float
    beta_p: float
    two_m: float
    horizon_area: float
    sqrt_area_over_16pi: float
    F_at_beta_p: float
    lower_bound: float
    F_limit: float | None
    capacity_bound: float
    boundary_mean_curv: float = 0.0
    tolerance: float = 1e-9

    @property
    def boundary_is_minimal(self) -> bool:
        """The chain 2m >= beta_p only follows when H = 0 on the boundary."""
        return abs(self.boundary_mean_curv) <= self.tolerance

    @property
    def boundary_bound_holds(self) -> bool:
        return self.F_at_beta_p >= self.lower_bound - self.tolerance * max(
            abs(self.lower_bound), 1.0
        )

    @property
    def beta_bound_holds(self) -> bool:
        return self.beta_p <= self.two_m + self.tolerance

    def row(self) -> list[float]:
        nan = float("nan")
        return [
            self.p,
            self.Cap_p,
            self.c_p,
            self.beta_p,
            self.two_m,
            self.F_at_beta_p,
            self.lower_bound,
            self.F_limit if self.F_limit is not None else nan,
            self.capacity_bound,
        ]


@dataclass
class MassReport:
    adm_surface: float
    adm_from_F: float | None
    adm_from_fit: float | None
    fit_residual: float | None = None
    penrose: list[PenroseRow] = field(default_factory=list)

    def __post_init__(self):
        self.penrose = [
            r if isinstance(r, PenroseRow) else PenroseRow(**r) for r in self.penrose
        ]

    @property
    def estimates(self) -> list[float]:
        return [
            m
            for m in (self.adm_surface, self.adm_from_F, self.adm_from_fit)
            if m is not None
        ]

    @property
    def consistency(self) -> float:
        """Largest pairwise deviation between the available mass estimates."""
        pairs = list(combinations(self.estimates, 2))
        if not pairs:
            return 0.0
        return max(abs(a - b) for a, b in pairs)

    def summary(self) -> dict[str, object]:
        return {
            "adm_surface": self.adm_surface,
            "adm_from_F": self.adm_from_F,
            "adm_from_fit": self.adm_from_fit,
            "fit_residual": self.fit_residual,
            "consistency": self.consistency,
            "penrose": [
                asdict(r)
                | {
                    "boundary_bound_holds": r.boundary_bound_holds,
                    "beta_bound_holds": r.beta_bound_holds,
                }
                for r in self.penrose
            ],
        }

    def export_csv(self, dest_dir: str | Path, filename: str) -> Path:
        """beta_p against p, one row per exponent."""
        if not isinstance(dest_dir, Path):
            dest_dir = Path(dest_dir)

        dest_dir.mkdir(parents=True, exist_ok=True)
        filepath: Path = dest_dir / f"{filename}.csv"

        with open(filepath, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(PENROSE_COLUMNS)
            for r in self.penrose:
                writer.writerow([repr(float(v)) for v in r.row()])

        return filepath

    def save_to_json(
        self, dest_dir: str | Path, filename: str, indent: int = 4
    ) -> None:
        """Save a MassReport object to a JSON file"""
        if not isinstance(dest_dir, Path):
            dest_dir = Path(dest_dir)

        dest_dir.mkdir(parents=True, exist_ok=True)

        filepath: Path = dest_dir / f"{filename}.json"

        with open(filepath, "w") as f:
            json.dump(asdict(self), f, indent=indent)

    @classmethod
    def load_from_json(cls, source_dir: str | Path, filename: str) -> "MassReport":
        """Load a MassReport object from a JSON file"""
        if not isinstance(source_dir, Path):
            source_dir = Path(source_dir)

        filepath: Path = source_dir / f"{filename}.json"

        with open(filepath, "r") as f:
            report_data = json.load(f)

        return cls(**report_data)
