from .factory import ProfileFactory, default_profile_factory
from .models import (
    MetricKind,
    MetricModel,
    SphereGeometry,
    area_radius,
    area_radius_derivative,
    area_radius_second_derivative,
    conformal_factor,
    default_audit_radii,
    horizon_area,
    mean_curvature,
    normal_ricci,
    scalar_curvature,
    scalar_curvature_profile,
    sphere_geometry,
)
from .profiles import (
    ConformalProfile,
    FlatProfile,
    SchwarzschildProfile,
    SmoothedSchwarzschildProfile,
    TabulatedProfile,
)

__all__ = [
    "ConformalProfile",
    "FlatProfile",
    "MetricKind",
    "MetricModel",
    "ProfileFactory",
    "SchwarzschildProfile",
    "SmoothedSchwarzschildProfile",
    "SphereGeometry",
    "TabulatedProfile",
    "area_radius",
    "area_radius_derivative",
    "area_radius_second_derivative",
    "conformal_factor",
    "default_audit_radii",
    "default_profile_factory",
    "horizon_area",
    "mean_curvature",
    "normal_ricci",
    "scalar_curvature",
    "scalar_curvature_profile",
    "sphere_geometry",
]
