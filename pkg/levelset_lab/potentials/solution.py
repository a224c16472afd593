from dataclasses import dataclass, field
from enum import StrEnum
from functools import cached_property
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.interpolate import PchipInterpolator

from ..exceptions import DomainError
from ..metrics import MetricModel, area_radius, conformal_factor
from .quadrature import TailIntegral

SOLUTION_TABLE_HEADER = "r,u,gradnorm"

FLUX_SAMPLES = 64
FLUX_STEP_FRACTION = 0.1


def richardson_derivative(f, r: float, h: float) -> float:
    """(4 D(h/2) - D(h)) / 3 with D the central difference."""

    def central(step: float) -> float:
        return (f(r + step) - f(r - step)) / (2.0 * step)

    return (4.0 * central(0.5 * h) - central(h)) / 3.0


class ProblemKind(StrEnum):
    GREEN_POLE = "GreenPole"
    CAPACITARY = "Capacitary"


@dataclass(frozen=True)
class PotentialSolution:
    """
    Radial harmonic or p-harmonic potential u with 1 - u = c_p * T(r).

    The level parameter t and the level value of u are tied by
    1 - u = c_p k t^(-q) with k = (p-1)/(3-p) and q = 1/k; for the Green's
    function (p = 2, c_p = 1) this is u = 1 - 1/t.
    """

    model: MetricModel
    p_exponent: float
    problem: ProblemKind
    c_p: float
    tail_integral: TailIntegral = field(repr=False, compare=False)
    exterior: bool = False

    def __post_init__(self):
        if not 1.0 < self.p_exponent < 3.0:
            raise ValueError(
                f"Invalid p_exponent: {self.p_exponent}. Must lie in (1, 3)"
            )

        if self.c_p <= 0 or not np.isfinite(self.c_p):
            raise ValueError(f"Invalid c_p: {self.c_p}. Must be finite and positive")

        if self.problem == ProblemKind.GREEN_POLE and self.p_exponent != 2.0:
            raise ValueError(
                f"Invalid p_exponent: {self.p_exponent}. Must be 2 for {ProblemKind.GREEN_POLE}"
            )

    # ---------------------------------------------------------------------
    # Constants
    # ---------------------------------------------------------------------

    @property
    def beta(self) -> float:
        return 2.0 / (self.p_exponent - 1.0)

    @property
    def k(self) -> float:
        return (self.p_exponent - 1.0) / (3.0 - self.p_exponent)

    @property
    def q(self) -> float:
        return (3.0 - self.p_exponent) / (self.p_exponent - 1.0)

    @property
    def flux_constant(self) -> float:
        """C = rho^2 |grad u|^(p-1), constant on the whole manifold."""
        return self.c_p ** (self.p_exponent - 1.0)

    @property
    def capacity(self) -> float | None:
        if self.problem != ProblemKind.CAPACITARY:
            return None
        return 4.0 * np.pi * self.flux_constant

    @property
    def beta_p(self) -> float | None:
        """(c_p (p-1)/(3-p))^((p-1)/(3-p)), the value of t on the boundary."""
        if self.problem != ProblemKind.CAPACITARY:
            return None
        return (self.c_p * self.k) ** self.k

    # ---------------------------------------------------------------------
    # Tables
    # ---------------------------------------------------------------------

    @property
    def radii(self) -> NDArray[np.float64]:
        return self.tail_integral.nodes

    @property
    def one_minus_u(self) -> NDArray[np.float64]:
        return self.c_p * self.tail_integral.node_values

    @property
    def u_table(self) -> NDArray[np.float64]:
        return 1.0 - self.one_minus_u

    @property
    def grad_norm_table(self) -> NDArray[np.float64]:
        return self.grad_norm_at(self.radii)

    @property
    def t_range(self) -> tuple[float, float]:
        w = self.one_minus_u
        return self.t_of_tail(float(w[0])), self.t_of_tail(float(w[-1]))

    # ---------------------------------------------------------------------
    # Pointwise evaluation
    # ---------------------------------------------------------------------

    def tail(self, r: float) -> float:
        """1 - u(r)."""
        return self.c_p * self.tail_integral(r)

    def u(self, r: float) -> float:
        return 1.0 - self.tail(r)

    def grad_norm_at(self, r):
        """|grad u| = c_p rho^(-2/(p-1)) in the metric norm."""
        rho = np.asarray(area_radius(self.model, r))
        result = self.c_p * rho ** (-self.beta)
        return float(result) if result.ndim == 0 else result

    @cached_property
    def _log_tail_interpolant(self) -> PchipInterpolator:
        return PchipInterpolator(
            np.log(self.radii), np.log(self.one_minus_u), extrapolate=False
        )

    def tail_values(self, r: ArrayLike) -> NDArray[np.float64]:
        """
        1 - u on many points at once by monotone interpolation of the node
        table in log-log coordinates; for boundary data and initial guesses,
        not for functional evaluation.
        """
        rr = np.asarray(r, dtype=np.float64)
        values = np.exp(self._log_tail_interpolant(np.log(rr)))
        if np.any(~np.isfinite(values)):
            raise DomainError(
                f"Invalid radii: must lie in the solved range [{self.radii[0]}, {self.radii[-1]}]"
            )
        return values

    def radius_of_tail(self, one_minus_u: float) -> float:
        return self.tail_integral.radius_of(one_minus_u / self.c_p)

    def tail_of_t(self, t: float) -> float:
        if t <= 0:
            raise DomainError(f"Invalid t: {t}. Must be positive")
        return self.c_p * self.k * t ** (-self.q)

    def t_of_tail(self, one_minus_u: float) -> float:
        return (self.c_p * self.k / one_minus_u) ** self.k

    def level_of_t(self, t: float) -> float:
        """1 - 1/t for the Green's function, alpha_p(t) in the capacitary case."""
        return 1.0 - self.tail_of_t(t)

    def radius_of_t(self, t: float) -> float:
        try:
            return self.radius_of_tail(self.tail_of_t(t))
        except DomainError as exc:
            lo, hi = self.t_range
            raise DomainError(
                f"Invalid t: {t}. Must lie in the solved range [{lo}, {hi}]"
            ) from exc

    def t_of_radius(self, r: float) -> float:
        return self.t_of_tail(self.tail(r))

    def flux_integral(self, r: float) -> float:
        """Integral of |grad u|^(p-1) over the level through r (4 pi for Green, Cap_p otherwise)."""
        rho = float(area_radius(self.model, r))
        return 4.0 * np.pi * rho**2 * float(self.grad_norm_at(r)) ** (
            self.p_exponent - 1.0
        )

    def max_flux_defect(self, samples: int = FLUX_SAMPLES) -> float:
        """
        max of |rho^2 |grad u|^(p-1) / C - 1| with |grad u| = phi^-2 |u'| and u'
        a Richardson derivative of the solved 1 - u.

        Samples sit at geometric midpoints of node intervals and every stencil
        stays inside its interval.
        """
        nodes = self.radii
        count = min(samples, nodes.size - 1)
        picks = np.unique(np.linspace(0, nodes.size - 2, count).astype(int))
        left, right = nodes[picks], nodes[picks + 1]
        mid = np.sqrt(left * right)
        steps = FLUX_STEP_FRACTION * np.minimum(mid - left, right - mid)

        slopes = np.array(
            [richardson_derivative(self.tail, float(r), float(h)) for r, h in zip(mid, steps)]
        )
        phi = np.asarray(conformal_factor(self.model, mid))
        rho = np.asarray(area_radius(self.model, mid))
        with np.errstate(invalid="ignore"):
            flux = rho**2 * (-slopes / phi**2) ** (self.p_exponent - 1.0)

        defect = np.abs(flux / self.flux_constant - 1.0)
        if not np.all(np.isfinite(defect)):
            return float("inf")
        return float(np.max(defect))

    # ---------------------------------------------------------------------
    # Export
    # ---------------------------------------------------------------------

    def metadata(self) -> dict[str, object]:
        meta = dict(self.model.describe())
        meta.update(
            {
                "problem": str(self.problem),
                "p": self.p_exponent,
                "C": self.flux_constant,
                "Cap_p": self.capacity,
                "c_p": self.c_p,
                "beta_p": self.beta_p,
                "exterior": self.exterior,
            }
        )
        return meta

    def export_csv(self, dest_dir: str | Path, filename: str) -> Path:
        """Write `r,u,gradnorm` with `# key: value` metadata lines."""
        if not isinstance(dest_dir, Path):
            dest_dir = Path(dest_dir)

        dest_dir.mkdir(parents=True, exist_ok=True)
        filepath: Path = dest_dir / f"{filename}.csv"

        table = np.column_stack([self.radii, self.u_table, self.grad_norm_table])
        with open(filepath, "w", encoding="utf-8") as f:
            for key, value in self.metadata().items():
                f.write(f"# {key}: {value}\n")
            f.write(f"{SOLUTION_TABLE_HEADER}\n")
            np.savetxt(f, table, delimiter=",", fmt="%.17g")

        return filepath
