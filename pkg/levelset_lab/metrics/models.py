"""
Conformally flat, rotationally symmetric test metrics g = phi(r)^4 (dr^2 + r^2 dOmega^2)
and the closed-form geometry of their coordinate spheres.

All quantities are in geometric units (G = c = 1); lengths and masses share
one unit. Functions accept scalars or numpy arrays and return the same shape.
"""

from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..exceptions import DomainError
from ..logging_config import get_logger
from .factory import default_profile_factory
from .profiles import ConformalProfile, TabulatedProfile

logger = get_logger(__name__)

Scalar = float | NDArray[np.float64]


class MetricKind(StrEnum):
    FLAT = "flat"
    SCHWARZSCHILD_ISOTROPIC = "schwarzschild_isotropic"
    SMOOTHED_SCHWARZSCHILD = "smoothed_schwarzschild"
    CUSTOM_RADIAL_CONFORMAL = "custom_radial_conformal"


@dataclass(frozen=True)
class MetricModel:
    kind: MetricKind
    mass_param: float = 0.0
    smoothing_a: float = 0.0
    inner_radius: float | None = None
    profile: ConformalProfile | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        try:
            kind = MetricKind(self.kind)
        except ValueError as exc:
            raise ValueError(
                f"Invalid kind: {self.kind}. Must be one of {[k.value for k in MetricKind]}"
            ) from exc
        object.__setattr__(self, "kind", kind)

        if self.smoothing_a < 0:
            raise ValueError(
                f"Invalid smoothing_a: {self.smoothing_a}. Must be non-negative"
            )

        if self.inner_radius is not None and self.inner_radius <= 0:
            raise ValueError(
                f"Invalid inner_radius: {self.inner_radius}. Must be positive"
            )

        if kind == MetricKind.CUSTOM_RADIAL_CONFORMAL:
            if not isinstance(self.profile, TabulatedProfile):
                raise ValueError(
                    "A custom_radial_conformal model needs a TabulatedProfile"
                )
            if self.mass_param == 0.0:
                object.__setattr__(self, "mass_param", self.profile.mass_param)
        elif self.profile is None:
            object.__setattr__(self, "profile", self._build_profile(kind))

        if kind != MetricKind.FLAT and self.mass_param < 0:
            if kind != MetricKind.SMOOTHED_SCHWARZSCHILD:
                raise ValueError(
                    f"Invalid mass_param: {self.mass_param}. Must be non-negative for {kind}"
                )
            logger.warning(
                "Negative mass %s: scalar curvature is negative near the origin",
                self.mass_param,
            )

    def _build_profile(self, kind: MetricKind) -> ConformalProfile:
        factory = default_profile_factory()

        if kind == MetricKind.FLAT:
            if self.mass_param != 0.0:
                raise ValueError(
                    f"Invalid mass_param: {self.mass_param}. Must be 0 for flat"
                )
            return factory.get_profile(kind)

        if kind == MetricKind.SMOOTHED_SCHWARZSCHILD and self.smoothing_a > 0:
            return factory.get_profile(
                kind, mass=self.mass_param, smoothing_a=self.smoothing_a
            )

        # Smoothing scale 0 is the exact Schwarzschild chart
        return factory.get_profile(
            MetricKind.SCHWARZSCHILD_ISOTROPIC, mass=self.mass_param
        )

    # ---------------------------------------------------------------------
    # Constructors
    # ---------------------------------------------------------------------

    @classmethod
    def flat(cls, inner_radius: float | None = None) -> "MetricModel":
        return cls(kind=MetricKind.FLAT, inner_radius=inner_radius)

    @classmethod
    def schwarzschild(
        cls, mass: float, inner_radius: float | None = None
    ) -> "MetricModel":
        return cls(
            kind=MetricKind.SCHWARZSCHILD_ISOTROPIC,
            mass_param=mass,
            inner_radius=inner_radius,
        )

    @classmethod
    def schwarzschild_with_horizon(cls, mass: float) -> "MetricModel":
        """Schwarzschild exterior with its minimal sphere r0 = m/2 as boundary."""
        if mass <= 0:
            raise ValueError(f"Invalid mass: {mass}. Must be positive")
        return cls.schwarzschild(mass, inner_radius=mass / 2.0)

    @classmethod
    def smoothed(
        cls, mass: float, smoothing_a: float, inner_radius: float | None = None
    ) -> "MetricModel":
        return cls(
            kind=MetricKind.SMOOTHED_SCHWARZSCHILD,
            mass_param=mass,
            smoothing_a=smoothing_a,
            inner_radius=inner_radius,
        )

    @classmethod
    def from_profile_table(
        cls, path: str | Path, inner_radius: float | None = None
    ) -> "MetricModel":
        profile = TabulatedProfile.from_csv(path)
        return cls(
            kind=MetricKind.CUSTOM_RADIAL_CONFORMAL,
            mass_param=profile.mass_param,
            inner_radius=inner_radius,
            profile=profile,
        )

    # ---------------------------------------------------------------------
    # Properties
    # ---------------------------------------------------------------------

    @property
    def conformal_profile(self) -> ConformalProfile:
        assert self.profile is not None
        return self.profile

    @property
    def is_complete(self) -> bool:
        """True when the chart reaches r = 0 smoothly (a pole can be placed there)."""
        return not self.conformal_profile.singular_at_origin

    @property
    def length_scale(self) -> float:
        return max(abs(self.mass_param), self.inner_radius or 0.0, 1.0)

    def describe(self) -> dict[str, object]:
        return {
            "kind": str(self.kind),
            "mass": self.mass_param,
            "smoothing_a": self.smoothing_a,
            "inner_radius": self.inner_radius,
        }


@dataclass(frozen=True)
class SphereGeometry:
    coord_radius: float
    area_radius: float
    area: float
    mean_curv: float
    intrinsic_scalar_curv: float
    ambient_scalar_curv: float


# -------------------------------------------------------------------------
# Pointwise geometry
# -------------------------------------------------------------------------


def conformal_factor(model: MetricModel, r: ArrayLike) -> Scalar:
    return model.conformal_profile.value(r)


def scalar_curvature(model: MetricModel, r: ArrayLike) -> Scalar:
    """R = -8 phi^-5 (phi'' + 2 phi'/r) for g = phi^4 * flat."""
    profile = model.conformal_profile
    phi = np.asarray(profile.value(r))
    result = -8.0 * phi**-5 * np.asarray(profile.radial_laplacian(r))
    return float(result) if result.ndim == 0 else result


def area_radius(model: MetricModel, r: ArrayLike) -> Scalar:
    """rho = r phi^2, so the coordinate sphere has area 4 pi rho^2."""
    phi = np.asarray(conformal_factor(model, r))
    result = np.asarray(r, dtype=np.float64) * phi**2
    return float(result) if result.ndim == 0 else result


def area_radius_derivative(model: MetricModel, r: ArrayLike) -> Scalar:
    """d rho / dr = phi^2 + 2 r phi phi'."""
    profile = model.conformal_profile
    phi = np.asarray(profile.value(r))
    dphi = np.asarray(profile.derivative(r))
    result = phi**2 + 2.0 * np.asarray(r, dtype=np.float64) * phi * dphi
    return float(result) if result.ndim == 0 else result


def area_radius_second_derivative(model: MetricModel, r: ArrayLike) -> Scalar:
    profile = model.conformal_profile
    rr = np.asarray(r, dtype=np.float64)
    phi = np.asarray(profile.value(r))
    dphi = np.asarray(profile.derivative(r))
    ddphi = np.asarray(profile.second_derivative(r))
    result = 4.0 * phi * dphi + 2.0 * rr * dphi**2 + 2.0 * rr * phi * ddphi
    return float(result) if result.ndim == 0 else result


def mean_curvature(model: MetricModel, r: ArrayLike) -> Scalar:
    """H = (2/rho) (d rho/dr) / phi^2 with respect to the infinity-pointing normal."""
    rho = np.asarray(area_radius(model, r))
    phi = np.asarray(conformal_factor(model, r))
    result = 2.0 * np.asarray(area_radius_derivative(model, r)) / (rho * phi**2)
    return float(result) if result.ndim == 0 else result


def normal_ricci(model: MetricModel, r: ArrayLike) -> Scalar:
    """
    Ric(nu, nu) of the warped product ds^2 + rho(s)^2 dOmega^2, i.e. -2 rho_ss / rho,
    where s is the radial arclength (ds = phi^2 dr).
    """
    phi = np.asarray(conformal_factor(model, r))
    dphi = np.asarray(model.conformal_profile.derivative(r))
    rho = np.asarray(area_radius(model, r))
    drho = np.asarray(area_radius_derivative(model, r))
    ddrho = np.asarray(area_radius_second_derivative(model, r))
    rho_ss = (ddrho / phi**2 - 2.0 * drho * dphi / phi**3) / phi**2
    result = -2.0 * rho_ss / rho
    return float(result) if result.ndim == 0 else result


def sphere_geometry(model: MetricModel, r: float) -> SphereGeometry:
    rho = float(area_radius(model, r))
    if rho <= 0:
        raise DomainError(f"Invalid radius: {r}. Area radius {rho} must be positive")

    return SphereGeometry(
        coord_radius=float(r),
        area_radius=rho,
        area=4.0 * np.pi * rho**2,
        mean_curv=float(mean_curvature(model, r)),
        intrinsic_scalar_curv=2.0 / rho**2,
        ambient_scalar_curv=float(scalar_curvature(model, r)),
    )


def horizon_area(model: MetricModel) -> float:
    """|dM| = 4 pi (r0 phi(r0)^2)^2 for the boundary sphere r = r0."""
    if model.inner_radius is None:
        raise DomainError(
            f"Model {model.kind} has no inner_radius; horizon_area needs a boundary"
        )

    rho = float(area_radius(model, model.inner_radius))
    return 4.0 * np.pi * rho**2


def scalar_curvature_profile(
    model: MetricModel, radii: ArrayLike
) -> tuple[NDArray[np.float64], float]:
    """R on the given radii and its minimum."""
    values = np.atleast_1d(np.asarray(scalar_curvature(model, radii), dtype=np.float64))
    return values, float(values.min())


def default_audit_radii(model: MetricModel, num: int = 400) -> NDArray[np.float64]:
    """Log-spaced radii over [max(r0, a/10), 1e6] used by the curvature audit."""
    lower = max(model.inner_radius or 0.0, model.smoothing_a / 10.0)
    if lower <= 0:
        lower = 1e-3 * model.length_scale
    return np.geomspace(lower, 1e6, num)
