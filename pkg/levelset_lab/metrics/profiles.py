from abc import ABC, abstractmethod
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.interpolate import CubicSpline

from ..exceptions import DomainError

PROFILE_TABLE_HEADER = "r,phi"


def _as_array(r: ArrayLike) -> NDArray[np.float64]:
    return np.asarray(r, dtype=np.float64)


def _squeeze(values: NDArray[np.float64]) -> NDArray[np.float64] | float:
    """Return a Python float for 0-d results, the array otherwise."""
    if values.ndim == 0:
        return float(values)
    return values


class ConformalProfile(ABC):
    """Base interface for radial conformal factors phi with g = phi^4 * (flat)."""

    singular_at_origin: bool = True

    @property
    @abstractmethod
    def mass_param(self) -> float:
        """Coefficient m of the Schwarzschildian expansion phi = 1 + m/(2r) + O(r^-3)."""

    @property
    def r_min(self) -> float:
        """Smallest admissible radius (exclusive when singular_at_origin)."""
        return 0.0

    @abstractmethod
    def _value(self, r: NDArray[np.float64]) -> NDArray[np.float64]:
        pass

    @abstractmethod
    def _first(self, r: NDArray[np.float64]) -> NDArray[np.float64]:
        pass

    @abstractmethod
    def _second(self, r: NDArray[np.float64]) -> NDArray[np.float64]:
        pass

    def _laplacian(self, r: NDArray[np.float64]) -> NDArray[np.float64]:
        return self._second(r) + 2.0 * self._first(r) / r

    def check_domain(self, r: ArrayLike) -> NDArray[np.float64]:
        arr = _as_array(r)
        if self.singular_at_origin:
            bad = arr <= self.r_min
        else:
            bad = arr < self.r_min
        if np.any(bad) or np.any(~np.isfinite(arr)):
            lo = "(" if self.singular_at_origin else "["
            raise DomainError(
                f"Invalid radius: {arr[bad].min() if np.any(bad) else arr}. "
                f"Must lie in {lo}{self.r_min}, inf) for {type(self).__name__}"
            )
        return arr

    def value(self, r: ArrayLike) -> NDArray[np.float64] | float:
        return _squeeze(self._value(self.check_domain(r)))

    def derivative(self, r: ArrayLike) -> NDArray[np.float64] | float:
        return _squeeze(self._first(self.check_domain(r)))

    def second_derivative(self, r: ArrayLike) -> NDArray[np.float64] | float:
        return _squeeze(self._second(self.check_domain(r)))

    def radial_laplacian(self, r: ArrayLike) -> NDArray[np.float64] | float:
        """Flat radial Laplacian phi'' + 2 phi'/r."""
        return _squeeze(self._laplacian(self.check_domain(r)))

    def __call__(self, r: ArrayLike) -> NDArray[np.float64] | float:
        return self.value(r)


class FlatProfile(ConformalProfile):
    """Euclidean space, phi = 1."""

    singular_at_origin = False

    @property
    def mass_param(self) -> float:
        return 0.0

    def _value(self, r):
        return np.ones_like(r)

    def _first(self, r):
        return np.zeros_like(r)

    def _second(self, r):
        return np.zeros_like(r)

    def _laplacian(self, r):
        return np.zeros_like(r)


class SchwarzschildProfile(ConformalProfile):
    """Spatial Schwarzschild in isotropic coordinates, phi = 1 + m/(2r)."""

    def __init__(self, mass: float = 1.0) -> None:
        if mass < 0:
            raise ValueError(f"Invalid mass: {mass}. Must be non-negative")
        self._mass = float(mass)

    @property
    def mass_param(self) -> float:
        return self._mass

    def _value(self, r):
        return 1.0 + self._mass / (2.0 * r)

    def _first(self, r):
        return -self._mass / (2.0 * r**2)

    def _second(self, r):
        return self._mass / r**3

    def _laplacian(self, r):
        # 1/r is flat-harmonic away from the origin
        return np.zeros_like(r)


class SmoothedSchwarzschildProfile(ConformalProfile):
    """
    Complete regularisation of Schwarzschild, phi = 1 + m/(2 sqrt(r^2 + a^2)).

    Needs a > 0; build a = 0 through MetricModel, which selects the exact
    Schwarzschild chart.
    """

    singular_at_origin = False

    def __init__(self, mass: float = 1.0, smoothing_a: float = 1.0) -> None:
        if smoothing_a <= 0:
            raise ValueError(
                f"Invalid smoothing_a: {smoothing_a}. Must be positive"
            )
        # phi(0) = 1 + m/(2a) must stay positive
        if 1.0 + mass / (2.0 * smoothing_a) <= 0:
            raise ValueError(
                f"Invalid mass: {mass}. Must exceed -2*smoothing_a = {-2.0 * smoothing_a}"
            )
        self._mass = float(mass)
        self._a = float(smoothing_a)

    @property
    def mass_param(self) -> float:
        return self._mass

    @property
    def smoothing_a(self) -> float:
        return self._a

    def _value(self, r):
        return 1.0 + self._mass / (2.0 * np.sqrt(r**2 + self._a**2))

    def _first(self, r):
        return -0.5 * self._mass * r * (r**2 + self._a**2) ** -1.5

    def _second(self, r):
        s = r**2 + self._a**2
        return -0.5 * self._mass * (self._a**2 - 2.0 * r**2) * s**-2.5

    def _laplacian(self, r):
        return -1.5 * self._mass * self._a**2 * (r**2 + self._a**2) ** -2.5


class TabulatedProfile(ConformalProfile):
    """
    User supplied profile sampled on a strictly increasing radial table.

    Inside the table phi is a cubic spline and its derivatives are the
    derivatives of the spline. Beyond the last node phi continues as
    1 + m/(2r) with m = 2 r_last (phi(r_last) - 1).
    """

    def __init__(self, radii: ArrayLike, values: ArrayLike) -> None:
        r = _as_array(radii)
        phi = _as_array(values)

        if r.ndim != 1 or r.shape != phi.shape or r.size < 4:
            raise ValueError(
                "Invalid profile table: need two equal-length columns with at least 4 rows"
            )
        if np.any(np.diff(r) <= 0):
            raise ValueError("Invalid profile table: r must be strictly increasing")
        if r[0] < 0:
            raise ValueError(f"Invalid profile table: r starts at {r[0]}. Must be >= 0")
        if np.any(phi <= 0):
            raise ValueError("Invalid profile table: phi must be positive")

        self._r = r
        self._phi = phi
        self._spline = CubicSpline(r, phi)
        self._r_last = float(r[-1])
        self._tail_mass = 2.0 * self._r_last * (float(phi[-1]) - 1.0)
        self.singular_at_origin = bool(r[0] > 0)

    @classmethod
    def from_csv(cls, path: str | Path) -> "TabulatedProfile":
        """Load a two-column `r,phi` table with a header line."""
        if not isinstance(path, Path):
            path = Path(path)

        if not path.is_file():
            raise FileNotFoundError(f"Profile table not found: {path}")

        with open(path, "r", encoding="utf-8") as f:
            header = f.readline().strip().replace(" ", "")

        if header != PROFILE_TABLE_HEADER:
            raise ValueError(
                f"Invalid profile header: {header!r}. Must be {PROFILE_TABLE_HEADER!r}"
            )

        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if data.shape[1] != 2:
            raise ValueError(
                f"Invalid profile table: expected 2 columns, got {data.shape[1]}"
            )

        return cls(data[:, 0], data[:, 1])

    @property
    def mass_param(self) -> float:
        return self._tail_mass

    @property
    def r_min(self) -> float:
        return float(self._r[0]) if self.singular_at_origin else 0.0

    @property
    def table(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        return self._r.copy(), self._phi.copy()

    def check_domain(self, r: ArrayLike) -> NDArray[np.float64]:
        arr = _as_array(r)
        if np.any(arr < self._r[0]) or np.any(~np.isfinite(arr)):
            raise DomainError(
                f"Invalid radius: {arr.min()}. Must lie in [{self._r[0]}, inf) for TabulatedProfile"
            )
        return arr

    def _piecewise(self, r, inside, outside):
        inner = r <= self._r_last
        result = np.empty_like(r)
        result[inner] = inside(r[inner])
        result[~inner] = outside(r[~inner])
        return result

    def _value(self, r):
        r = np.atleast_1d(r)
        out = self._piecewise(
            r, self._spline, lambda s: 1.0 + self._tail_mass / (2.0 * s)
        )
        return out

    def _first(self, r):
        r = np.atleast_1d(r)
        return self._piecewise(
            r, self._spline.derivative(1), lambda s: -self._tail_mass / (2.0 * s**2)
        )

    def _second(self, r):
        r = np.atleast_1d(r)
        return self._piecewise(
            r, self._spline.derivative(2), lambda s: self._tail_mass / s**3
        )

    def _laplacian(self, r):
        r = np.atleast_1d(r)
        second = self._second(r)
        result = np.array(3.0 * second)
        nonzero = r > 0
        result[nonzero] = second[nonzero] + 2.0 * self._first(r[nonzero]) / r[nonzero]
        return result

    def value(self, r):
        scalar = np.ndim(r) == 0
        out = self._value(self.check_domain(r))
        return float(out[0]) if scalar else out

    def derivative(self, r):
        scalar = np.ndim(r) == 0
        out = self._first(self.check_domain(r))
        return float(out[0]) if scalar else out

    def second_derivative(self, r):
        scalar = np.ndim(r) == 0
        out = self._second(self.check_domain(r))
        return float(out[0]) if scalar else out

    def radial_laplacian(self, r):
        scalar = np.ndim(r) == 0
        out = self._laplacian(self.check_domain(r))
        return float(out[0]) if scalar else out
