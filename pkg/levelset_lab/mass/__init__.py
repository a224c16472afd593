from .asymptotics import (
    I_profile,
    Ip_limit,
    Ip_profile,
    adm_mass_profile,
    adm_mass_surface,
    endpoint_matches,
    expansion_template,
    fit_expansion,
    mass_report,
    penrose_check,
    penrose_row,
    penrose_trend,
)
from .reports import PENROSE_COLUMNS, MassReport, PenroseRow

__all__ = [
    "I_profile",
    "Ip_limit",
    "Ip_profile",
    "MassReport",
    "PENROSE_COLUMNS",
    "PenroseRow",
    "adm_mass_profile",
    "adm_mass_surface",
    "endpoint_matches",
    "expansion_template",
    "fit_expansion",
    "mass_report",
    "penrose_check",
    "penrose_row",
    "penrose_trend",
]
