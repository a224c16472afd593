"""
Pointwise checks of the divergence identities behind the monotonicity of F.

For the Green's function the vector field

    X = grad u / (1-u) + grad|grad u| / (1-u)^2 + |grad u| grad u / (1-u)^3

is radial on a radial solution, X = X_s nu, and
div X = (1/(rho^2 phi^2)) d(rho^2 X_s)/dr. With y = 1/(rho (1-u)) and
s = rho H / 2 one has 4 pi rho^2 X_s = F at t = 1/(1-u), i.e.

    rho^2 X_s = rho y [(y - s)^2 + (1 - s)(1 + s)].
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import quad

from ..exceptions import DomainError, QuadratureError
from ..functionals import eval_F
from ..logging_config import get_logger
from ..metrics import (
    area_radius,
    conformal_factor,
    mean_curvature,
    normal_ricci,
    scalar_curvature,
)
from ..potentials import PotentialSolution, ProblemKind, richardson_derivative
from .reports import IdentitySample, IdentityTag, IntegralCheck, relative_error

logger = get_logger(__name__)

TOLERANCES = {
    IdentityTag.DIVX_GEOMETRIC: 1e-6,
    IdentityTag.DIVX_BOCHNER: 1e-4,
    IdentityTag.MEAN_CURV_HARMONIC: 1e-8,
    IdentityTag.GAUSS_REWRITE: 1e-6,
}
INTEGRAL_TOLERANCE = 1e-8
INTEGRAL_QUAD_RTOL = 1e-10


def finite_difference_step(r: float) -> float:
    return max(1e-6, 1e-4 * r)


class _RadialPoint:
    """Closed-form geometry of the Green's function at one radius."""

    def __init__(self, sol: PotentialSolution, r: float) -> None:
        model = sol.model
        self.r = r
        self.rho = float(area_radius(model, r))
        self.phi = float(conformal_factor(model, r))
        self.w = sol.tail(r)
        self.G = float(sol.grad_norm_at(r))
        self.H = float(mean_curvature(model, r))
        self.R = float(scalar_curvature(model, r))
        self.R_sigma = 2.0 / self.rho**2
        self.ricci = float(normal_ricci(model, r))
        # d|grad u|/ds = -beta |grad u| H / 2 since |grad u| = c rho^(-beta)
        self.G_s = -0.5 * sol.beta * self.G * self.H

        dphi = float(model.conformal_profile.derivative(r))
        self.one_minus_s = -2.0 * r * dphi / self.phi
        self.y_minus_one = float(np.expm1(-np.log(self.rho * self.w)))

    @property
    def bochner_magnitude(self) -> float:
        """Sum of the absolute Bochner-form terms, G/w^2 included."""
        terms = (
            self.G,
            3.0 * self.G**2 / self.w**2,
            3.0 * self.G_s / self.w,
            0.5 * self.H**2,
            self.ricci,
        )
        return self.G / self.w**2 * sum(abs(x) for x in terms)

    @property
    def gauss_magnitude(self) -> float:
        terms = (0.5 * self.H**2, self.ricci, 0.5 * self.R, 0.5 * self.R_sigma)
        return sum(abs(x) for x in terms)

    @property
    def deviation(self) -> float:
        """2|grad u|/(1-u) - H = (2/rho)(y - s)."""
        return 2.0 * (self.y_minus_one + self.one_minus_s) / self.rho


def _require_green(sol: PotentialSolution) -> None:
    if sol.problem != ProblemKind.GREEN_POLE:
        raise DomainError(
            f"The divergence identities need a {ProblemKind.GREEN_POLE} solution, got {sol.problem}"
        )


def flux_of_X(sol: PotentialSolution, r: float) -> float:
    """rho^2 X_s, grouped as in F to avoid cancellation."""
    point = _RadialPoint(sol, r)
    y = 1.0 + point.y_minus_one
    s = 1.0 - point.one_minus_s
    y_minus_s = point.y_minus_one + point.one_minus_s
    return point.rho * y * (y_minus_s**2 + point.one_minus_s * (1.0 + s))


def divX_geometric(sol: PotentialSolution, r: float) -> float:
    """(G/w^2)[G - R^Sigma/2 + R/2 + (3/4)(2G/w - H)^2] on a round level."""
    p = _RadialPoint(sol, r)
    bracket = p.G - 0.5 * p.R_sigma + 0.5 * p.R + 0.75 * p.deviation**2
    return p.G / p.w**2 * bracket


def divX_bochner(sol: PotentialSolution, r: float) -> float:
    """
    (G/w^2)[G + 3G^2/w^2 + 3 G_s/w + (|D^2u|^2 - |D|Du||^2 + Ric(Du,Du))/G^2]

    where the Hessian term reduces to G^2 |h|^2 = G^2 H^2 / 2 on umbilic levels.
    """
    p = _RadialPoint(sol, r)
    bracket = (
        p.G
        + 3.0 * p.G**2 / p.w**2
        + 3.0 * p.G_s / p.w
        + 0.5 * p.H**2
        + p.ricci
    )
    return p.G / p.w**2 * bracket


def divX_finite_difference(sol: PotentialSolution, r: float) -> float:
    model = sol.model
    rho = float(area_radius(model, r))
    phi = float(conformal_factor(model, r))
    derivative = richardson_derivative(
        lambda x: flux_of_X(sol, x), r, finite_difference_step(r)
    )
    return derivative / (rho**2 * phi**2)


def check_divX(sol: PotentialSolution, r: float, tag: IdentityTag) -> IdentitySample:
    """
    DivX_Geometric compares the level-set form with the Bochner form;
    DivX_Bochner compares the finite-difference divergence of X with the
    Bochner form; GaussRewrite compares -(|h|^2 + Ric(nu, nu)) with
    -R/2 + R^Sigma/2 - (3/4) H^2.
    """
    _require_green(sol)
    tag = IdentityTag(tag)
    point = _RadialPoint(sol, r)

    match tag:
        case IdentityTag.DIVX_GEOMETRIC:
            lhs, rhs = divX_geometric(sol, r), divX_bochner(sol, r)
            magnitude = point.bochner_magnitude
        case IdentityTag.DIVX_BOCHNER:
            lhs, rhs = divX_finite_difference(sol, r), divX_bochner(sol, r)
            magnitude = point.bochner_magnitude
        case IdentityTag.GAUSS_REWRITE:
            lhs = -(0.5 * point.H**2 + point.ricci)
            rhs = -0.5 * point.R + 0.5 * point.R_sigma - 0.75 * point.H**2
            magnitude = point.gauss_magnitude
        case _:
            raise ValueError(f"Invalid tag: {tag}. Use check_meancurv for {tag}")

    return IdentitySample(
        r=r,
        tag=tag,
        lhs=lhs,
        rhs=rhs,
        relerr=relative_error(lhs, rhs, magnitude),
        tolerance=TOLERANCES[tag],
    )


def check_meancurv(sol: PotentialSolution, r: float) -> IdentitySample:
    """
    Geometric H of the coordinate sphere against -(p-1) D^2u(Du, Du)/|Du|^3,
    with D^2u(nu, nu) = d|grad u|/ds taken by differentiating the solver's
    |grad u| profile. For p = 2 the factor is 1.
    """
    model = sol.model
    phi = float(conformal_factor(model, r))
    G = float(sol.grad_norm_at(r))
    G_s = (
        richardson_derivative(
            lambda x: float(sol.grad_norm_at(x)), r, finite_difference_step(r)
        )
        / phi**2
    )

    lhs = float(mean_curvature(model, r))
    rhs = -(sol.p_exponent - 1.0) * G_s / G
    tag = IdentityTag.MEAN_CURV_HARMONIC

    return IdentitySample(
        r=r,
        tag=tag,
        lhs=lhs,
        rhs=rhs,
        relerr=relative_error(lhs, rhs),
        tolerance=TOLERANCES[tag],
    )


def check_integral(sol: PotentialSolution, s: float, t: float) -> IntegralCheck:
    """Divergence theorem and coarea: int div X dmu between two levels equals F(t) - F(s)."""
    _require_green(sol)
    if not 0 < s < t:
        raise ValueError(f"Invalid levels: s={s}, t={t}. Must satisfy 0 < s < t")

    model = sol.model
    r_s, r_t = sol.radius_of_t(s), sol.radius_of_t(t)

    def density(r: float) -> float:
        rho = float(area_radius(model, r))
        phi = float(conformal_factor(model, r))
        return divX_geometric(sol, r) * 4.0 * np.pi * rho**2 * phi**2

    lhs, error = quad(
        density, r_s, r_t, epsabs=0.0, epsrel=INTEGRAL_QUAD_RTOL, limit=200
    )
    rhs = eval_F(sol, t).F_value - eval_F(sol, s).F_value
    if error > 0.1 * INTEGRAL_TOLERANCE * max(abs(lhs), 1e-9):
        raise QuadratureError(
            f"Integral of div X between r={r_s:g} and r={r_t:g} has error {error:.3e}"
        )

    return IntegralCheck(
        s=s,
        t=t,
        lhs=float(lhs),
        rhs=rhs,
        relerr=relative_error(lhs, rhs),
        tolerance=INTEGRAL_TOLERANCE,
    )


def default_identity_radii(sol: PotentialSolution, num: int = 100) -> NDArray[np.float64]:
    """Log-spaced radii from just above the solved range to 1e2 * max(m, r0, 1)."""
    lower = float(sol.radii[0]) * 1.01
    upper = min(1e2 * sol.model.length_scale, float(sol.radii[-1]) / 1.01)
    return np.geomspace(lower, upper, num)


def identity_suite(
    sol: PotentialSolution, radii: NDArray[np.float64] | None = None, jobs: int = 1
) -> list[IdentitySample]:
    """All four identities at every radius, ordered by radius then tag."""
    _require_green(sol)
    if radii is None:
        radii = default_identity_radii(sol)

    def at(r: float) -> list[IdentitySample]:
        return [
            check_divX(sol, r, IdentityTag.DIVX_GEOMETRIC),
            check_divX(sol, r, IdentityTag.DIVX_BOCHNER),
            check_meancurv(sol, r),
            check_divX(sol, r, IdentityTag.GAUSS_REWRITE),
        ]

    with ThreadPoolExecutor(max_workers=max(jobs, 1)) as executor:
        rows = list(executor.map(at, [float(r) for r in radii]))

    samples = [s for row in rows for s in row]
    flagged = [s for s in samples if s.flagged]
    for s in flagged:
        logger.warning(
            "%s at r=%g: relerr %.3e exceeds %.0e", s.tag, s.r, s.relerr, s.tolerance
        )
    return samples
