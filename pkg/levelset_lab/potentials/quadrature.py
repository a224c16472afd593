"""
Tail integrals of the radial potentials.

Both radial problems reduce to the same quantity. For exponent p, write
beta = 2/(p-1) and gamma = 2 - 4/(p-1). The unnormalised tail is

    T(r) = integral from r to infinity of s^(-beta) * phi(s)^gamma ds,

and the potential is 1 - u(r) = c_p * T(r). Green's case is p = 2, c = 1,
where the integrand is 1/(s^2 phi(s)^2).
"""

from abc import ABC, abstractmethod

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import quad, quad_vec
from scipy.optimize import brentq
from scipy.special import hyp2f1

from ..exceptions import DomainError, QuadratureError
from ..logging_config import get_logger
from ..metrics import ConformalProfile

logger = get_logger(__name__)

QUAD_RTOL = 1e-12
TAIL_RTOL = 1e-10
PARTIAL_QUAD_RTOL = 1e-13
RANGE_RTOL = 1e-12


def tail_exponents(p: float) -> tuple[float, float]:
    """(beta, gamma) of the tail integrand for the p-Laplacian."""
    beta = 2.0 / (p - 1.0)
    gamma = 2.0 - 4.0 / (p - 1.0)
    return beta, gamma


def analytic_tail(radius: float, mass: float, p: float) -> float:
    """
    Exact tail beyond `radius` for phi = 1 + m/(2s):

        R^(1-beta)/(beta-1) * 2F1(-gamma, beta-1; beta; -m/(2R)).

    For p = 2 this is 1/(R + m/2).
    """
    beta, gamma = tail_exponents(p)
    z = -mass / (2.0 * radius)
    if abs(z) >= 1.0:
        raise QuadratureError(
            f"Analytic tail needs |m/(2R)| < 1, got m={mass}, R={radius}"
        )
    return float(
        radius ** (1.0 - beta) / (beta - 1.0) * hyp2f1(-gamma, beta - 1.0, beta, z)
    )


class TailIntegral(ABC):
    """Evaluates T(r) and its inverse on [r_min, r_max]."""

    def __init__(self, nodes: NDArray[np.float64]) -> None:
        self._nodes = nodes

    @property
    def nodes(self) -> NDArray[np.float64]:
        return self._nodes

    @property
    @abstractmethod
    def node_values(self) -> NDArray[np.float64]:
        """T at every grid node (strictly decreasing)."""

    @abstractmethod
    def __call__(self, r: float) -> float:
        pass

    @abstractmethod
    def radius_of(self, value: float) -> float:
        """The r with T(r) = value."""

    def check_radius(self, r: float) -> None:
        if not (self._nodes[0] <= r <= self._nodes[-1]):
            raise DomainError(
                f"Invalid radius: {r}. Must lie in the solved range "
                f"[{self._nodes[0]}, {self._nodes[-1]}]"
            )

    def check_value(self, value: float) -> float:
        """Return `value` snapped onto the solved range when it misses an end by rounding only."""
        values = self.node_values
        lo, hi = float(values[-1]), float(values[0])
        slack = RANGE_RTOL * abs(hi)
        if not (lo * (1.0 - RANGE_RTOL) <= value <= hi + slack):
            raise DomainError(
                f"Invalid tail value: {value}. Must lie in the solved range [{lo}, {hi}]"
            )
        return min(max(value, lo), hi)


class QuadratureTail(TailIntegral):
    """
    T(r) by adaptive Gauss-Kronrod quadrature on every grid interval plus the
    analytic Schwarzschild tail beyond the last node.
    """

    def __init__(
        self,
        profile: ConformalProfile,
        p: float,
        nodes: NDArray[np.float64],
        rtol: float = QUAD_RTOL,
    ) -> None:
        super().__init__(nodes)
        self._profile = profile
        self._p = p
        self._beta, self._gamma = tail_exponents(p)
        self._rtol = rtol

        self._far_tail = self._far_field_tail()
        interval_integrals = self._interval_integrals()

        # Reverse cumulative sum: T(r_i) = sum_{j >= i} I_j + far tail
        values = np.empty_like(nodes)
        values[-1] = self._far_tail
        values[:-1] = np.cumsum(interval_integrals[::-1])[::-1] + self._far_tail
        self._values = values

        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise QuadratureError(
                "Tail integral is not finite and positive on the grid; "
                "the flux integral diverges for this profile"
            )

    def integrand(self, s):
        phi = self._profile.value(s)
        return np.power(s, -self._beta) * np.power(phi, self._gamma)

    def _far_field_tail(self) -> float:
        r_max = float(self._nodes[-1])
        mass = self._profile.mass_param
        phi = float(self._profile.value(r_max))

        deviation = abs(self._gamma) * abs(phi - (1.0 + mass / (2.0 * r_max))) / phi
        if deviation > TAIL_RTOL:
            raise QuadratureError(
                f"Relative tail estimate {deviation:.3e} exceeds {TAIL_RTOL:.0e} at r_max={r_max}; "
                f"phi is not Schwarzschildian there"
            )

        tail = analytic_tail(r_max, mass, self._p)
        logger.debug("Analytic tail beyond r_max=%g: %.17g", r_max, tail)
        return tail

    def _interval_integrals(self) -> NDArray[np.float64]:
        left = self._nodes[:-1]
        log_ratio = np.log(self._nodes[1:] / left)

        # Map each interval to x in [0, 1] with s = left * exp(x * log_ratio)
        # and normalise by a midpoint estimate so that the max-norm tolerance
        # of quad_vec acts as a relative tolerance on every component.
        mid = left * np.exp(0.5 * log_ratio)
        scale = self.integrand(mid) * mid * log_ratio

        def mapped(x: float) -> NDArray[np.float64]:
            s = left * np.exp(x * log_ratio)
            return self.integrand(s) * s * log_ratio / scale

        result, error, info = quad_vec(
            mapped, 0.0, 1.0, epsabs=0.0, epsrel=self._rtol, full_output=True
        )
        if info.status != 0 or error > 10.0 * self._rtol * np.max(np.abs(result)):
            raise QuadratureError(
                f"Interval quadrature failed (status={info.status}, error={error:.3e})"
            )

        logger.debug(
            "Interval quadrature: %d intervals, %d evaluations, error %.3e",
            left.size,
            info.neval,
            error,
        )
        return result * scale

    @property
    def node_values(self) -> NDArray[np.float64]:
        return self._values

    def __call__(self, r: float) -> float:
        self.check_radius(r)

        i = int(np.searchsorted(self._nodes, r, side="right")) - 1
        if i >= self._nodes.size - 1:
            return float(self._values[-1])

        right = float(self._nodes[i + 1])
        partial, _ = quad(
            self.integrand, r, right, epsabs=0.0, epsrel=PARTIAL_QUAD_RTOL
        )
        return float(self._values[i + 1] + partial)

    def radius_of(self, value: float) -> float:
        value = self.check_value(value)

        # node_values is decreasing; flip it for searchsorted
        reversed_values = self._values[::-1]
        j = int(np.searchsorted(reversed_values, value, side="left"))
        i = max(self._nodes.size - 1 - j, 0)
        if i >= self._nodes.size - 1:
            return float(self._nodes[-1])
        if self._values[i] == value:
            return float(self._nodes[i])

        lo, hi = float(self._nodes[i]), float(self._nodes[i + 1])

        def residual(r: float) -> float:
            return self(r) / value - 1.0

        # Node values and partial quadratures agree only to the quadrature tolerance
        if residual(lo) <= 0.0:
            return lo
        if residual(hi) >= 0.0:
            return hi

        return float(
            brentq(residual, lo, hi, xtol=1e-15 * lo, rtol=4.0 * np.finfo(float).eps)
        )


class SchwarzschildGreenTail(TailIntegral):
    """Closed form T(r) = 1/(r + m/2) of the exterior Schwarzschild Green's function."""

    def __init__(self, mass: float, nodes: NDArray[np.float64]) -> None:
        super().__init__(nodes)
        self._half_mass = 0.5 * mass
        self._values = 1.0 / (nodes + self._half_mass)

    @property
    def node_values(self) -> NDArray[np.float64]:
        return self._values

    def __call__(self, r: float) -> float:
        self.check_radius(r)
        return 1.0 / (r + self._half_mass)

    def radius_of(self, value: float) -> float:
        value = self.check_value(value)
        return 1.0 / value - self._half_mass
