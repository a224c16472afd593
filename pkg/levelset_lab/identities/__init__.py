from .checks import (
    check_divX,
    check_integral,
    check_meancurv,
    default_identity_radii,
    divX_bochner,
    divX_finite_difference,
    divX_geometric,
    flux_of_X,
    identity_suite,
)
from .reports import (
    IDENTITY_COLUMNS,
    IdentitySample,
    IdentityTag,
    IntegralCheck,
    export_identity_csv,
    save_identity_json,
)

__all__ = [
    "IDENTITY_COLUMNS",
    "IdentitySample",
    "IdentityTag",
    "IntegralCheck",
    "check_divX",
    "check_integral",
    "check_meancurv",
    "default_identity_radii",
    "divX_bochner",
    "divX_finite_difference",
    "divX_geometric",
    "export_identity_csv",
    "flux_of_X",
    "identity_suite",
    "save_identity_json",
]
