"""
Three routes to the ADM mass of g = phi^4 * flat and the capacitary
ladder 2m >= beta_p.

For a conformally flat metric the coordinate flux integral
(1/16 pi) sum (d_j g_ij - d_i g_jj) x^i/|x| over the sphere |x| = r reduces
to m(r) = -2 r^2 phi^3 phi', which tends to the mass like a + b/r + c/r^2.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Iterable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..exceptions import DomainError, FitInstabilityError
from ..functionals import default_t_grid, eval_Fp, sweep
from ..logging_config import get_logger
from ..metrics import MetricModel, horizon_area, mean_curvature
from ..potentials import (
    PotentialSolution,
    ProblemKind,
    RadialGrid,
    capacity,
    solve_capacitary,
    solve_green,
)
from .reports import MassReport, PenroseRow

logger = get_logger(__name__)

ADM_RADII_RANGE = (1e2, 1e4)
FIT_RADII_RANGE = (1e2, 1e3)
FIT_NOISE_FLOOR = 1e-8
PENROSE_TOLERANCE = 1e-9


def _default_radii(
    model: MetricModel, bounds: tuple[float, float], num: int
) -> NDArray[np.float64]:
    scale = model.length_scale
    return np.geomspace(bounds[0] * scale, bounds[1] * scale, num)


def adm_mass_profile(model: MetricModel, radii: ArrayLike) -> NDArray[np.float64]:
    """m(r) = -2 r^2 phi(r)^3 phi'(r) on each coordinate sphere."""
    r = np.atleast_1d(np.asarray(radii, dtype=np.float64))
    profile = model.conformal_profile
    phi = np.asarray(profile.value(r))
    dphi = np.asarray(profile.derivative(r))
    return -2.0 * r**2 * phi**3 * dphi


def adm_mass_surface(model: MetricModel, radii: ArrayLike | None = None) -> float:
    """Flux-integral mass extrapolated to r = infinity by a fit in 1/r."""
    if radii is None:
        radii = _default_radii(model, ADM_RADII_RANGE, 24)

    r = np.atleast_1d(np.asarray(radii, dtype=np.float64))
    masses = adm_mass_profile(model, r)
    if r.size < 3:
        return float(masses[-1])

    coefficients = np.polyfit(1.0 / r, masses, 2)
    return float(coefficients[-1])


def expansion_template(sol: PotentialSolution, r: NDArray[np.float64]) -> NDArray[np.float64]:
    """
    Second-order coefficient of 1 - u scaled to the mass:

        (k c_p r^(-q) - (1 - u)) * 2 r^(2/(p-1)) / ((3-p) c_p) = m + O(1/r),

    which for the Green's function is (1/r - (1 - u)) * 2 r^2.
    """
    p = sol.p_exponent
    w = np.array([sol.tail(float(x)) for x in r])
    leading = sol.k * sol.c_p * r ** (-sol.q)
    return (leading - w) * 2.0 * r**sol.beta / ((3.0 - p) * sol.c_p)


def fit_expansion(
    sol: PotentialSolution, radii: ArrayLike | None = None
) -> tuple[float, float]:
    """
    Least-squares fit of the scaled expansion coefficient to m + b/r.

    Returns (mass_fit, residual) with residual the RMS misfit. Raises
    FitInstabilityError when the deviation from the fitted mass does not
    decay toward the outer end of the radii.
    """
    if radii is None:
        radii = _default_radii(sol.model, FIT_RADII_RANGE, 40)

    r = np.atleast_1d(np.asarray(radii, dtype=np.float64))
    if r.size < 4:
        raise ValueError(f"Invalid radii: need at least 4 points, got {r.size}")

    y = expansion_template(sol, r)
    slope, mass_fit = np.polyfit(1.0 / r, y, 1)
    residual = float(np.sqrt(np.mean((y - (mass_fit + slope / r)) ** 2)))

    deviation = np.abs(y - mass_fit)
    floor = FIT_NOISE_FLOOR * max(abs(mass_fit), 1.0)
    if deviation[-1] > max(deviation[0], floor):
        raise FitInstabilityError(
            f"Expansion coefficient does not settle: deviation {deviation[-1]:.3e} at "
            f"r={r[-1]:g} exceeds {deviation[0]:.3e} at r={r[0]:g}"
        )

    logger.debug("Expansion fit: m=%.12g, residual %.3e", mass_fit, residual)
    return float(mass_fit), residual


def _I_values(sol: PotentialSolution, radii: ArrayLike) -> NDArray[np.float64]:
    """
    c^((3p-7)/(3-p)) (k/w)^k [c^(3-p) + (k c / w)^2 G^(3-p) - (k c^2 / w) G^(2-p) H]
    with w = 1 - u and G = |grad u|.
    """
    r = np.atleast_1d(np.asarray(radii, dtype=np.float64))
    p, c, k = sol.p_exponent, sol.c_p, sol.k

    w = np.array([sol.tail(float(x)) for x in r])
    G = np.asarray(sol.grad_norm_at(r))
    H = np.asarray(mean_curvature(sol.model, r))

    bracket = c ** (3.0 - p) + (k * c / w) ** 2 * G ** (3.0 - p) - k * c**2 / w * G ** (
        2.0 - p
    ) * H
    return c ** ((3.0 * p - 7.0) / (3.0 - p)) * (k / w) ** k * bracket


def Ip_limit(sol: PotentialSolution) -> float:
    """2 m c_p^(1-p)."""
    return 2.0 * sol.model.mass_param * sol.c_p ** (1.0 - sol.p_exponent)


def Ip_profile(sol: PotentialSolution, radii: ArrayLike) -> NDArray[np.float64]:
    """The integrand I_p with F_p(t) = int I_p |grad u|^(p-1) over the level."""
    if sol.problem != ProblemKind.CAPACITARY:
        raise DomainError("Ip_profile needs a capacitary solution")
    return _I_values(sol, radii)


def I_profile(sol: PotentialSolution, radii: ArrayLike) -> NDArray[np.float64]:
    """(1/(1-u)) [1 - H/(1-u) + |grad u|/(1-u)^2] for the Green's function; tends to 2m."""
    if sol.problem != ProblemKind.GREEN_POLE:
        raise DomainError("I_profile needs a Green's function")
    return _I_values(sol, radii)


def penrose_row(
    sol: PotentialSolution, with_limit: bool = True, jobs: int = 1
) -> PenroseRow:
    model = sol.model
    p = sol.p_exponent
    beta_p = sol.beta_p
    assert beta_p is not None

    cap = capacity(sol)
    area = horizon_area(model)
    k = sol.k

    F_limit = None
    if with_limit:
        report = sweep(sol, default_t_grid(sol), jobs=jobs)
        F_limit = report.limit_estimate

    assert model.inner_radius is not None
    row = PenroseRow(
        p=p,
        Cap_p=cap,
        c_p=sol.c_p,
        beta_p=beta_p,
        two_m=2.0 * model.mass_param,
        horizon_area=area,
        sqrt_area_over_16pi=float(np.sqrt(area / (16.0 * np.pi))),
        F_at_beta_p=eval_Fp(sol, beta_p).F_value,
        lower_bound=4.0 * np.pi * beta_p,
        F_limit=F_limit,
        capacity_bound=k**k * (cap / (4.0 * np.pi)) ** (1.0 / (3.0 - p)),
        boundary_mean_curv=float(mean_curvature(model, model.inner_radius)),
        tolerance=PENROSE_TOLERANCE,
    )

    if row.boundary_is_minimal and not row.beta_bound_holds:
        logger.warning("beta_p=%.12g exceeds 2m=%.12g at p=%g", beta_p, row.two_m, p)
    return row


def penrose_check(
    model: MetricModel,
    p_list: Iterable[float],
    grid: RadialGrid | None = None,
    with_limit: bool = True,
    jobs: int = 1,
) -> list[PenroseRow]:
    """Solve the capacitary problem for every p and collect the ladder, sorted by p."""
    ps = sorted(float(p) for p in p_list)
    if model.inner_radius is None:
        raise DomainError(
            f"Model {model.kind} has no inner_radius; penrose_check needs a boundary"
        )

    def job(p: float) -> PenroseRow:
        return penrose_row(solve_capacitary(model, p, grid=grid), with_limit=with_limit)

    with ThreadPoolExecutor(max_workers=max(jobs, 1)) as executor:
        return list(executor.map(job, ps))


def penrose_trend(rows: list[PenroseRow]) -> bool:
    """beta_p nonincreasing in p over rows sorted by p."""
    betas = [r.beta_p for r in sorted(rows, key=lambda r: r.p)]
    return all(b <= a * (1.0 + 1e-12) for a, b in zip(betas, betas[1:]))


def endpoint_matches(rows: list[PenroseRow], model: MetricModel, tol: float = 1e-12) -> bool:
    """m = sqrt(|dM| / 16 pi) up to tol * max(m, 1)."""
    scale = max(abs(model.mass_param), 1.0)
    return all(
        abs(r.sqrt_area_over_16pi - model.mass_param) <= tol * scale for r in rows
    )


def mass_report(
    model: MetricModel,
    p_list: Iterable[float] = (),
    jobs: int = 1,
    grid: RadialGrid | None = None,
) -> MassReport:
    green = solve_green(model, exterior=not model.is_complete)
    limit = sweep(green, default_t_grid(green), jobs=jobs).limit_estimate
    adm_from_F = None if limit is None else limit / (8.0 * np.pi)
    adm_from_fit, residual = fit_expansion(green)

    rows = []
    p_values = list(p_list)
    if p_values and model.inner_radius is not None:
        rows = penrose_check(model, p_values, grid=grid, jobs=jobs)

    report = MassReport(
        adm_surface=adm_mass_surface(model),
        adm_from_F=adm_from_F,
        adm_from_fit=adm_from_fit,
        fit_residual=residual,
        penrose=rows,
    )
    logger.info(
        "Mass estimates: surface %.10g, F-limit %s, fit %.10g (spread %.3e)",
        report.adm_surface,
        report.adm_from_F,
        report.adm_from_fit,
        report.consistency,
    )
    return report
