from .evaluate import (
    check_derivative,
    derivative_decomposition,
    eval_F,
    eval_Fp,
    evaluate,
    sphere_deviation_weight,
)
from .reports import (
    REPORT_COLUMNS,
    DerivativeCheck,
    DerivativeTerms,
    LevelSetSample,
    MonotonicityReport,
    SkippedLevel,
    Violation,
)
from .sweep import (
    default_t_grid,
    derivative_check_grid,
    derivative_checks,
    estimate_limit,
    find_violations,
    sweep,
)

__all__ = [
    "REPORT_COLUMNS",
    "DerivativeCheck",
    "DerivativeTerms",
    "LevelSetSample",
    "MonotonicityReport",
    "SkippedLevel",
    "Violation",
    "check_derivative",
    "default_t_grid",
    "derivative_check_grid",
    "derivative_checks",
    "derivative_decomposition",
    "estimate_limit",
    "eval_F",
    "eval_Fp",
    "evaluate",
    "find_violations",
    "sphere_deviation_weight",
    "sweep",
]
