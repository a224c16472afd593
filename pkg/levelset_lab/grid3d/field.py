from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml
from numpy.typing import ArrayLike, NDArray
from scipy.interpolate import RegularGridInterpolator

from ..logging_config import get_logger
from ..metrics import MetricKind, MetricModel, conformal_factor

logger = get_logger(__name__)

FAR_FIELD_TOL = 1e-3
RAW_DTYPE = "<f8"


@dataclass(frozen=True)
class ConformalField:
    """
    Conformal factor sampled on the nodes of the cube [-L/2, L/2]^3 with N
    nodes per axis. `phi[i, j, k]` sits at (x_i, y_j, z_k).
    """

    side_length: float
    resolution: int
    pole: tuple[float, float, float]
    phi: NDArray[np.float64] = field(repr=False, compare=False)
    kind: MetricKind = MetricKind.FLAT
    mass: float = 0.0
    smoothing_a: float = 0.0

    def __post_init__(self):
        if self.side_length <= 0:
            raise ValueError(
                f"Invalid side_length: {self.side_length}. Must be positive"
            )

        if self.resolution < 8:
            raise ValueError(f"Invalid resolution: {self.resolution}. Must be >= 8")

        expected = (self.resolution,) * 3
        if self.phi.shape != expected:
            raise ValueError(
                f"Invalid phi shape: {self.phi.shape}. Must be {expected}"
            )

        if np.any(self.phi <= 0) or not np.all(np.isfinite(self.phi)):
            raise ValueError("Invalid phi: must be finite and positive on all nodes")

        object.__setattr__(self, "pole", tuple(float(c) for c in self.pole))
        object.__setattr__(self, "kind", MetricKind(self.kind))

        half = 0.5 * self.side_length
        if any(abs(c) >= half for c in self.pole):
            raise ValueError(f"Invalid pole: {self.pole}. Must lie inside the box")

        deviation = self.far_field_deviation()
        if deviation > FAR_FIELD_TOL:
            raise ValueError(
                f"Invalid phi: deviates by {deviation:.3e} from 1 + m/(2|x|) on the boundary "
                f"shell. Must be within {FAR_FIELD_TOL}"
            )

    @classmethod
    def from_model(
        cls,
        model: MetricModel,
        side_length: float,
        resolution: int,
        pole: ArrayLike = (0.0, 0.0, 0.0),
    ) -> "ConformalField":
        axis = np.linspace(-0.5 * side_length, 0.5 * side_length, resolution)
        x, y, z = np.meshgrid(axis, axis, axis, indexing="ij")
        radius = np.sqrt(x**2 + y**2 + z**2)
        phi = np.asarray(conformal_factor(model, radius), dtype=np.float64)

        return cls(
            side_length=side_length,
            resolution=resolution,
            pole=tuple(np.asarray(pole, dtype=np.float64)),
            phi=phi,
            kind=model.kind,
            mass=model.mass_param,
            smoothing_a=model.smoothing_a,
        )

    # ---------------------------------------------------------------------
    # Geometry of the box
    # ---------------------------------------------------------------------

    @property
    def spacing(self) -> float:
        return self.side_length / (self.resolution - 1)

    @property
    def axis(self) -> NDArray[np.float64]:
        half = 0.5 * self.side_length
        return np.linspace(-half, half, self.resolution)

    @property
    def origin(self) -> NDArray[np.float64]:
        return np.full(3, -0.5 * self.side_length)

    def node_coordinates(self) -> tuple[NDArray[np.float64], ...]:
        axis = self.axis
        return tuple(np.meshgrid(axis, axis, axis, indexing="ij"))

    def pole_distance_to_boundary(self) -> float:
        """Distance from the pole to the nearest face, in cells."""
        half = 0.5 * self.side_length
        gap = min(half - abs(c) for c in self.pole)
        return gap / self.spacing

    def phi_at(self, points: ArrayLike) -> NDArray[np.float64]:
        interpolator = RegularGridInterpolator(
            (self.axis, self.axis, self.axis), self.phi, method="cubic"
        )
        return interpolator(np.atleast_2d(points))

    def radial_model(self) -> MetricModel:
        """Rotationally symmetric model carrying the far field of this field."""
        if self.kind == MetricKind.SMOOTHED_SCHWARZSCHILD and self.smoothing_a > 0:
            return MetricModel.smoothed(self.mass, self.smoothing_a)
        if self.mass == 0:
            return MetricModel.flat()
        return MetricModel.schwarzschild(self.mass)

    def far_field_deviation(self) -> float:
        """max |phi - (1 + m/(2|x|))| over the outermost layer of nodes."""
        x, y, z = self.node_coordinates()
        radius = np.sqrt(x**2 + y**2 + z**2)

        shell = np.zeros(self.phi.shape, dtype=bool)
        shell[[0, -1], :, :] = True
        shell[:, [0, -1], :] = True
        shell[:, :, [0, -1]] = True

        schwarzschild = 1.0 + self.mass / (2.0 * radius[shell])
        return float(np.max(np.abs(self.phi[shell] - schwarzschild)))

    # ---------------------------------------------------------------------
    # Raw block I/O
    # ---------------------------------------------------------------------

    def header(self) -> dict[str, object]:
        return {
            "L": self.side_length,
            "N": self.resolution,
            "o": list(self.pole),
            "kind": str(self.kind),
            "mass": self.mass,
            "smoothing_a": self.smoothing_a,
            "dtype": RAW_DTYPE,
            "order": "C",
        }

    def save_raw(self, dest_dir: str | Path, filename: str) -> tuple[Path, Path]:
        """Write phi as little-endian float64 (`.f8`) with a YAML sidecar (`.yaml`)."""
        if not isinstance(dest_dir, Path):
            dest_dir = Path(dest_dir)

        dest_dir.mkdir(parents=True, exist_ok=True)

        data_path: Path = dest_dir / f"{filename}.f8"
        header_path: Path = dest_dir / f"{filename}.yaml"

        np.ascontiguousarray(self.phi, dtype=RAW_DTYPE).tofile(data_path)
        with open(header_path, "w", encoding="utf-8") as f:
            yaml.safe_dump(self.header(), f, sort_keys=False)

        return data_path, header_path

    @classmethod
    def load_raw(cls, source_dir: str | Path, filename: str) -> "ConformalField":
        if not isinstance(source_dir, Path):
            source_dir = Path(source_dir)

        data_path: Path = source_dir / f"{filename}.f8"
        header_path: Path = source_dir / f"{filename}.yaml"

        for path in (data_path, header_path):
            if not path.is_file():
                raise FileNotFoundError(f"Field file not found: {path}")

        with open(header_path, "r", encoding="utf-8") as f:
            header = yaml.safe_load(f)

        missing = {"L", "N", "o", "kind"} - set(header or {})
        if missing:
            raise ValueError(f"Missing required keys in field header: {sorted(missing)}")

        n = int(header["N"])
        phi = np.fromfile(data_path, dtype=RAW_DTYPE)
        if phi.size != n**3:
            raise ValueError(
                f"Invalid field block: {phi.size} values. Must be N^3 = {n**3}"
            )

        logger.debug("Loaded %d^3 field block from %s", n, data_path)

        return cls(
            side_length=float(header["L"]),
            resolution=n,
            pole=tuple(header["o"]),
            phi=phi.reshape((n, n, n)).astype(np.float64),
            kind=header["kind"],
            mass=float(header.get("mass", 0.0)),
            smoothing_a=float(header.get("smoothing_a", 0.0)),
        )
