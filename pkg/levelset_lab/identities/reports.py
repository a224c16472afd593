import csv
import json
from dataclasses import asdict, dataclass
from enum import StrEnum
from pathlib import Path

IDENTITY_COLUMNS = ["r", "tag", "lhs", "rhs", "relerr"]


class IdentityTag(StrEnum):
    DIVX_BOCHNER = "DivX_Bochner"
    DIVX_GEOMETRIC = "DivX_Geometric"
    MEAN_CURV_HARMONIC = "MeanCurvHarmonic"
    GAUSS_REWRITE = "GaussRewrite"


def relative_error(
    lhs: float, rhs: float, magnitude: float = 1.0, floor: float = 1e-9
) -> float:
    """
    |lhs - rhs| / max(|rhs|, floor * magnitude), where `magnitude` is the size
    of the individual terms that cancel in rhs.
    """
    return abs(lhs - rhs) / max(abs(rhs), floor * magnitude)


@dataclass(frozen=True)
class IdentitySample:
    r: float
    tag: IdentityTag
    lhs: float
    rhs: float
    relerr: float
    tolerance: float

    def __post_init__(self):
        object.__setattr__(self, "tag", IdentityTag(self.tag))

        if self.r <= 0:
            raise ValueError(f"Invalid r: {self.r}. Must be positive")

    @property
    def flagged(self) -> bool:
        return not self.relerr < self.tolerance


@dataclass(frozen=True)
class IntegralCheck:
    """int div(X) over {1 - 1/s < u < 1 - 1/t} against F(t) - F(s)."""

    s: float
    t: float
    lhs: float
    rhs: float
    relerr: float
    tolerance: float

    @property
    def flagged(self) -> bool:
        return not self.relerr < self.tolerance


def export_identity_csv(
    samples: list[IdentitySample], dest_dir: str | Path, filename: str
) -> Path:
    if not isinstance(dest_dir, Path):
        dest_dir = Path(dest_dir)

    dest_dir.mkdir(parents=True, exist_ok=True)
    filepath: Path = dest_dir / f"{filename}.csv"

    with open(filepath, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(IDENTITY_COLUMNS)
        for s in samples:
            writer.writerow(
                [repr(float(s.r)), str(s.tag), repr(s.lhs), repr(s.rhs), repr(s.relerr)]
            )

    return filepath


def save_identity_json(
    samples: list[IdentitySample],
    integrals: list[IntegralCheck],
    dest_dir: str | Path,
    filename: str,
    indent: int = 4,
) -> None:
    if not isinstance(dest_dir, Path):
        dest_dir = Path(dest_dir)

    dest_dir.mkdir(parents=True, exist_ok=True)

    filepath: Path = dest_dir / f"{filename}.json"

    with open(filepath, "w") as f:
        json.dump(
            {
                "samples": [asdict(s) | {"tag": str(s.tag)} for s in samples],
                "integrals": [asdict(i) for i in integrals],
            },
            f,
            indent=indent,
        )
