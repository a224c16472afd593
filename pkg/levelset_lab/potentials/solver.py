import numpy as np

from ..exceptions import DomainError, QuadratureError
from ..logging_config import get_logger
from ..metrics import MetricKind, MetricModel
from .grid import RadialGrid
from .quadrature import QuadratureTail, SchwarzschildGreenTail
from .solution import PotentialSolution, ProblemKind

logger = get_logger(__name__)


def solve_green(
    model: MetricModel, grid: RadialGrid | None = None, exterior: bool = False
) -> PotentialSolution:
    """
    Green's function with pole at the origin, normalised so that u -> 1 at
    infinity and the flux of |grad u| through every level is 4 pi:

        u(r) = 1 - integral_r^inf ds / (s^2 phi(s)^2).

    Models singular at r = 0 have no pole there; they are accepted only with
    `exterior=True`, which returns the exterior potential on the solved range
    (closed form 1 - 1/(r + m/2) for Schwarzschild).
    """
    if not model.is_complete and not exterior:
        raise DomainError(
            f"Model {model.kind} is not complete at the pole; "
            "pass exterior=True for the exterior closed form"
        )

    if grid is None:
        grid = RadialGrid.for_model(model)

    nodes = grid.nodes
    if exterior and model.kind == MetricKind.SCHWARZSCHILD_ISOTROPIC:
        tail = SchwarzschildGreenTail(model.mass_param, nodes)
    else:
        tail = QuadratureTail(model.conformal_profile, 2.0, nodes)

    logger.debug(
        "Green solve on %s: %d nodes in [%g, %g], exterior=%s",
        model.kind,
        nodes.size,
        nodes[0],
        nodes[-1],
        exterior,
    )

    return PotentialSolution(
        model=model,
        p_exponent=2.0,
        problem=ProblemKind.GREEN_POLE,
        c_p=1.0,
        tail_integral=tail,
        exterior=exterior,
    )


def solve_capacitary(
    model: MetricModel, p: float, grid: RadialGrid | None = None
) -> PotentialSolution:
    """
    p-capacitary potential of the sphere r = r0: u(r0) = 0, u -> 1 at infinity.

    The flux C = rho^2 |grad u|^(p-1) enters only through c_p = C^(1/(p-1)),
    and 1 - u = c_p T(r) is linear in c_p, so the normalisation u(r0) = 0
    gives c_p = 1 / T(r0) directly.
    """
    if not 1.0 < p < 3.0:
        raise ValueError(f"Invalid p: {p}. Must lie in (1, 3)")

    if model.inner_radius is None:
        raise DomainError(
            f"Model {model.kind} has no inner_radius; the capacitary problem needs a boundary"
        )

    if grid is None:
        grid = RadialGrid.for_model(model)

    if not np.isclose(grid.r_min, model.inner_radius, rtol=1e-14, atol=0.0):
        raise DomainError(
            f"Invalid grid: r_min={grid.r_min}. Must start at inner_radius={model.inner_radius}"
        )

    tail = QuadratureTail(model.conformal_profile, p, grid.nodes)
    normaliser = float(tail.node_values[0])
    if not np.isfinite(normaliser) or normaliser <= 0:
        raise QuadratureError(
            f"Normalisation integral {normaliser} is not finite and positive for p={p}"
        )

    c_p = 1.0 / normaliser
    logger.debug("Capacitary solve on %s, p=%g: c_p=%.17g", model.kind, p, c_p)

    return PotentialSolution(
        model=model,
        p_exponent=p,
        problem=ProblemKind.CAPACITARY,
        c_p=c_p,
        tail_integral=tail,
    )


def capacity(sol: PotentialSolution) -> float:
    """Cap_p = 4 pi C."""
    if sol.problem != ProblemKind.CAPACITARY:
        raise DomainError("capacity is defined for capacitary solutions only")
    return 4.0 * np.pi * sol.flux_constant


def cp_beta(sol: PotentialSolution) -> tuple[float, float]:
    """(c_p, beta_p) with c_p = (Cap_p/4pi)^(1/(p-1)) and beta_p = (c_p k)^k, k = (p-1)/(3-p)."""
    cap = capacity(sol)
    p = sol.p_exponent
    c_p = (cap / (4.0 * np.pi)) ** (1.0 / (p - 1.0))
    k = (p - 1.0) / (3.0 - p)
    return c_p, (c_p * k) ** k
