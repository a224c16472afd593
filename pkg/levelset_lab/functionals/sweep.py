from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..exceptions import DegenerateLevelError
from ..grid3d import GridPotentialSolution
from ..logging_config import get_logger
from ..potentials import PotentialSolution, ProblemKind
from .evaluate import FOUR_PI, check_derivative, evaluate
from .reports import (
    DerivativeCheck,
    LevelSetSample,
    MonotonicityReport,
    SkippedLevel,
    Violation,
)

logger = get_logger(__name__)

DEFAULT_NUM_T = 200
DEFAULT_NUM_DERIVATIVE_T = 50
DEFAULT_TOLERANCE = 1e-10
T_FLOOR = 1e-2
T_CEILING_FACTOR = 1e4
DERIVATIVE_CEILING_FACTOR = 1e2


def _mass_scale(sol: PotentialSolution) -> float:
    return max(abs(sol.model.mass_param), 1.0)


def default_t_grid(
    sol: PotentialSolution, num: int = DEFAULT_NUM_T, t_max: float | None = None
) -> NDArray[np.float64]:
    """
    Log-spaced t from the first admissible level (beta_p for capacitary
    potentials, max(t_min, 1e-2) for the Green's function) to 1e4 * max(m, 1).
    """
    lo, hi = sol.t_range
    if sol.problem == ProblemKind.CAPACITARY:
        assert sol.beta_p is not None
        lower = sol.beta_p
    else:
        lower = max(lo * (1.0 + 1e-9), T_FLOOR)

    upper = min(T_CEILING_FACTOR * _mass_scale(sol), hi)
    if t_max is not None:
        upper = min(upper, t_max)

    if upper <= lower:
        raise ValueError(
            f"Invalid t range: [{lower}, {upper}]. The solved range is too short"
        )
    return np.geomspace(lower, upper, num)


def derivative_check_grid(
    sol: PotentialSolution, num: int = DEFAULT_NUM_DERIVATIVE_T
) -> NDArray[np.float64]:
    """Interior t values for the derivative check, up to 1e2 * max(m, 1)."""
    grid = default_t_grid(sol, num=2)
    lower = grid[0] * (1.0 + 2e-3)
    upper = min(DERIVATIVE_CEILING_FACTOR * _mass_scale(sol), grid[-1] / (1.0 + 2e-3))
    return np.geomspace(lower, upper, num)


def _grid_error(sample: LevelSetSample) -> float:
    """Discretisation error estimate of a grid F from the flux defect."""
    return sample.t * abs(sample.flux - FOUR_PI)


def estimate_limit(samples: list[LevelSetSample]) -> float | None:
    """Intercept of a linear fit of F against 1/t over the top decade of t."""
    if not samples:
        return None

    t = np.array([s.t for s in samples])
    F = np.array([s.F_value for s in samples])
    top = t >= t[-1] / 10.0
    if np.count_nonzero(top) < 3:
        return None

    _, intercept = np.polyfit(1.0 / t[top], F[top], 1)
    return float(intercept)


def find_violations(
    samples: list[LevelSetSample], tol: float, grid: bool = False
) -> list[Violation]:
    violations = []
    for lo, hi in zip(samples, samples[1:]):
        pair_tol = tol
        if grid:
            pair_tol += _grid_error(lo) + _grid_error(hi)

        if hi.F_value < lo.F_value - pair_tol:
            violations.append(
                Violation(
                    t_lo=lo.t,
                    t_hi=hi.t,
                    F_lo=lo.F_value,
                    F_hi=hi.F_value,
                    tolerance=pair_tol,
                )
            )
    return violations


def sweep(
    sol: PotentialSolution | GridPotentialSolution,
    t_grid: ArrayLike,
    tol: float = DEFAULT_TOLERANCE,
    jobs: int = 1,
) -> MonotonicityReport:
    """
    Evaluate F (or F_p) on every t and report adjacent decreases beyond `tol`.
    Levels that are not regular on a grid solution are skipped and recorded.
    """
    ts = [float(t) for t in np.atleast_1d(np.asarray(t_grid, dtype=np.float64))]
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("Invalid t_grid: must be strictly increasing")

    def sample(t: float) -> LevelSetSample | SkippedLevel:
        try:
            return evaluate(sol, t)
        except DegenerateLevelError as exc:
            return SkippedLevel(t=t, reason=str(exc))

    with ThreadPoolExecutor(max_workers=max(jobs, 1)) as executor:
        results = list(executor.map(sample, ts))

    samples = [r for r in results if isinstance(r, LevelSetSample)]
    skipped = [r for r in results if isinstance(r, SkippedLevel)]
    for level in skipped:
        logger.warning("Skipped level t=%g: %s", level.t, level.reason)

    is_grid = isinstance(sol, GridPotentialSolution)
    violations = find_violations(samples, tol, grid=is_grid)
    for v in violations:
        logger.warning(
            "F decreases between t=%g and t=%g by %.3e (tolerance %.1e)",
            v.t_lo,
            v.t_hi,
            v.drop,
            v.tolerance,
        )

    report = MonotonicityReport(
        samples=samples,
        tolerance=tol,
        violations=violations,
        skipped=skipped,
        limit_estimate=estimate_limit(samples),
        initial_value=samples[0].F_value if samples else None,
        p_exponent=sol.p_exponent,
    )
    logger.info(
        "Sweep of %d levels: %d violations, %d skipped, limit %s",
        len(ts),
        len(violations),
        len(skipped),
        report.limit_estimate,
    )
    return report


def derivative_checks(
    sol: PotentialSolution, t_grid: ArrayLike | None = None, jobs: int = 1
) -> list[DerivativeCheck]:
    if t_grid is None:
        t_grid = derivative_check_grid(sol)

    ts = [float(t) for t in np.atleast_1d(np.asarray(t_grid, dtype=np.float64))]
    with ThreadPoolExecutor(max_workers=max(jobs, 1)) as executor:
        return list(executor.map(lambda t: check_derivative(sol, t), ts))
