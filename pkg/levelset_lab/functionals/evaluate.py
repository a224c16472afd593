"""
F(t) = 4 pi t - t^2 int |grad u| H + t^3 int |grad u|^2 for the Green's function
and its capacitary analogue

    F_p(t) = 4 pi t - t^beta / c_p * int |grad u| H + t^(2 beta - 1) / c_p^2 * int |grad u|^2

with beta = 2/(p-1), on the level set {1 - u = c_p k t^(-q)}.

On a radial solution every level is a coordinate sphere of area radius rho.
There |grad u| = c_p rho^(-beta) and, with y = t/rho, z = y^(beta-1) and
s = rho H / 2,

    F_p(t) = 4 pi t [(z - s)^2 + (1 - s)(1 + s)].

Both brackets vanish in flat space and 1 - s = -2 r phi'/phi is available
without cancellation, so F is evaluated in this form.
"""

from dataclasses import dataclass

import numpy as np

from ..exceptions import DomainError
from ..grid3d import GridPotentialSolution, extract_level_surface, surface_integrals
from ..logging_config import get_logger
from ..metrics import area_radius, conformal_factor, mean_curvature, scalar_curvature
from ..potentials import PotentialSolution, ProblemKind
from .reports import DerivativeCheck, DerivativeTerms, LevelSetSample

logger = get_logger(__name__)

FOUR_PI = 4.0 * np.pi
RICHARDSON_REL_STEP = 1e-3
BETA_P_RTOL = 1e-12


def sphere_deviation_weight(p: float) -> float:
    """kappa_p = (5-p)/(4(p-1)); 3/4 for the Green's function."""
    return (5.0 - p) / (4.0 * (p - 1.0))


@dataclass(frozen=True)
class _RadialLevel:
    """Closed-form quantities on the sphere {1 - u = c_p k t^(-q)}."""

    t: float
    r: float
    rho: float
    grad_norm: float
    mean_curv: float
    scalar_curv: float
    # z - s and 1 - s from the module docstring
    deviation: float
    one_minus_s: float


def _radial_level(sol: PotentialSolution, t: float) -> _RadialLevel:
    model = sol.model
    r = sol.radius_of_t(t)
    rho = float(area_radius(model, r))
    phi = float(conformal_factor(model, r))
    dphi = float(model.conformal_profile.derivative(r))

    one_minus_s = -2.0 * r * dphi / phi
    z_minus_one = float(np.expm1((sol.beta - 1.0) * np.log(t / rho)))

    return _RadialLevel(
        t=t,
        r=r,
        rho=rho,
        grad_norm=float(sol.grad_norm_at(r)),
        mean_curv=float(mean_curvature(model, r)),
        scalar_curv=float(scalar_curvature(model, r)),
        deviation=z_minus_one + one_minus_s,
        one_minus_s=one_minus_s,
    )


def _radial_terms(sol: PotentialSolution, level: _RadialLevel) -> DerivativeTerms:
    area = FOUR_PI * level.rho**2
    # 2 k |grad u| / (1 - u) - H = 2 (z - s) / rho on a sphere
    return DerivativeTerms(
        # int R^Sigma / 2 = 4 pi on a round sphere
        gauss_bonnet_deficit=0.0,
        grad_term=0.0,
        scalar_term=0.5 * level.scalar_curv * area,
        traceless_term=0.0,
        sphere_deviation=sphere_deviation_weight(sol.p_exponent)
        * 4.0
        * FOUR_PI
        * level.deviation**2,
    )


def _radial_sample(sol: PotentialSolution, t: float) -> LevelSetSample:
    level = _radial_level(sol, t)
    s = 1.0 - level.one_minus_s
    F_value = FOUR_PI * t * (level.deviation**2 + level.one_minus_s * (1.0 + s))

    area = FOUR_PI * level.rho**2
    G = level.grad_norm
    return LevelSetSample(
        t=t,
        level=sol.level_of_t(t),
        F_value=F_value,
        flux=area * G,
        int_grad2=area * G**2,
        int_gradH=area * G * level.mean_curv,
        p_exponent=sol.p_exponent,
        euler_char=2,
        coord_radius=level.r,
        derivative_terms=_radial_terms(sol, level),
    )


def _grid_sample(sol: GridPotentialSolution, t: float) -> LevelSetSample:
    level = 1.0 - 1.0 / t
    surface = extract_level_surface(sol, level)
    integrals = surface_integrals(surface)

    F_value = FOUR_PI * t - t**2 * integrals.int_gradH + t**3 * integrals.int_grad2
    logger.debug(
        "Grid level t=%g: flux %.6f, F %.6g, %d faces",
        t,
        integrals.flux,
        F_value,
        len(surface.faces),
    )

    return LevelSetSample(
        t=t,
        level=level,
        F_value=F_value,
        flux=integrals.flux,
        int_grad2=integrals.int_grad2,
        int_gradH=integrals.int_gradH,
        euler_char=surface.euler_char,
    )


def eval_F(sol: PotentialSolution | GridPotentialSolution, t: float) -> LevelSetSample:
    """F on the level {u = 1 - 1/t} of a Green's function, radial or on a grid."""
    if t <= 0:
        raise DomainError(f"Invalid t: {t}. Must be positive")

    if isinstance(sol, GridPotentialSolution):
        return _grid_sample(sol, t)

    if sol.problem != ProblemKind.GREEN_POLE:
        raise DomainError(
            f"eval_F needs a {ProblemKind.GREEN_POLE} solution, got {sol.problem}; use eval_Fp"
        )
    return _radial_sample(sol, t)


def eval_Fp(sol: PotentialSolution, t: float) -> LevelSetSample:
    """F_p on the level {u = alpha_p(t)} of a radial capacitary potential, t >= beta_p."""
    if sol.problem != ProblemKind.CAPACITARY:
        raise DomainError(
            f"eval_Fp needs a {ProblemKind.CAPACITARY} solution, got {sol.problem}"
        )

    beta_p = sol.beta_p
    assert beta_p is not None
    if t < beta_p * (1.0 - BETA_P_RTOL):
        raise DomainError(f"Invalid t: {t}. Must be >= beta_p = {beta_p}")

    return _radial_sample(sol, max(t, beta_p))


def evaluate(sol: PotentialSolution | GridPotentialSolution, t: float) -> LevelSetSample:
    """eval_Fp for capacitary potentials, eval_F otherwise."""
    if isinstance(sol, PotentialSolution) and sol.problem == ProblemKind.CAPACITARY:
        return eval_Fp(sol, t)
    return eval_F(sol, t)


def derivative_decomposition(sol: PotentialSolution, t: float) -> DerivativeTerms:
    """
    The integrated summands of F'(t). On radial levels the tangential gradient
    and the traceless second fundamental form vanish, the Gauss-Bonnet deficit
    is zero, and F'(t) = 4 pi rho^2 [kappa_p (2k|grad u|/(1-u) - H)^2 + R/2].
    """
    if not isinstance(sol, PotentialSolution):
        raise DomainError("derivative_decomposition needs a radial solution")

    return _radial_terms(sol, _radial_level(sol, t))


def _central_difference(sol: PotentialSolution, t: float, dt: float) -> float:
    return (evaluate(sol, t + dt).F_value - evaluate(sol, t - dt).F_value) / (2.0 * dt)


def check_derivative(
    sol: PotentialSolution, t: float, dt: float | None = None
) -> DerivativeCheck:
    """
    Compare the Richardson-extrapolated central difference
    (4 D(dt/2) - D(dt)) / 3 of F with the decomposition at t.
    """
    if dt is None:
        dt = RICHARDSON_REL_STEP * t

    if dt <= 0 or dt >= t:
        raise ValueError(f"Invalid dt: {dt}. Must lie in (0, t={t})")

    coarse = _central_difference(sol, t, dt)
    fine = _central_difference(sol, t, 0.5 * dt)
    lhs = (4.0 * fine - coarse) / 3.0
    rhs = derivative_decomposition(sol, t).total
    relerr = abs(lhs - rhs) / max(abs(rhs), 1e-9)

    return DerivativeCheck(t=t, lhs=lhs, rhs=rhs, relerr=relerr)
