from .field import ConformalField
from .solver import GridPotentialSolution, solve_green_3d
from .surfaces import (
    ExtractedSurface,
    SurfaceIntegrals,
    euler_characteristic,
    extract_level_surface,
    surface_integrals,
)

__all__ = [
    "ConformalField",
    "ExtractedSurface",
    "GridPotentialSolution",
    "SurfaceIntegrals",
    "euler_characteristic",
    "extract_level_surface",
    "solve_green_3d",
    "surface_integrals",
]
