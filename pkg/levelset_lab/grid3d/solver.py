"""
Finite-difference Green's function of g = phi^4 * flat on a uniform box.

In the chart the equation is div(phi^2 grad u) = 4 pi delta_o. The pole is
carried by the conformal singular part

    u_sing = 1 - 1/(phi(o) phi(x) |x - o|),

which is exact wherever phi is flat-harmonic. The remainder w = u - u_sing
solves

    -div(phi^2 grad w) = Lap(phi) / (phi(o) |x - o|),

a symmetric positive-definite problem for the 7-point stencil with face
coefficients (phi_i^2 + phi_j^2)/2 and Dirichlet data from the radial
Green's function of the far-field model.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.sparse.linalg import LinearOperator, cg

from ..exceptions import ConvergenceError, DomainError
from ..logging_config import get_logger
from ..potentials import PotentialSolution, solve_green
from .field import ConformalField

logger = get_logger(__name__)

DEFAULT_RTOL = 1e-9
MIN_POLE_CELLS = 10

# Mean of 1/|x| over the unit cube centred at the origin
CUBE_MEAN_INVERSE_DISTANCE = 2.3800772


@dataclass(frozen=True)
class GridPotentialSolution:
    conformal_field: ConformalField
    w: NDArray[np.float64] = field(repr=False, compare=False)
    phi_pole: float
    iterations: int
    rtol: float
    far_field: PotentialSolution = field(repr=False, compare=False)

    @property
    def p_exponent(self) -> float:
        return 2.0

    @property
    def spacing(self) -> float:
        return self.conformal_field.spacing

    def singular_derivatives(
        self,
        points: NDArray[np.float64],
        phi: NDArray[np.float64],
        grad_phi: NDArray[np.float64],
        hess_phi: NDArray[np.float64],
    ) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """
        Flat gradient (n, 3) and Hessian (n, 3, 3) of u_sing at `points`,
        given phi and its flat derivatives there.

        With S = f g, f = 1/(phi(o) phi) and g = 1/|x - o|, u_sing = 1 - S.
        """
        offset = np.atleast_2d(points) - np.asarray(self.conformal_field.pole)
        dist = np.linalg.norm(offset, axis=-1)

        g = 1.0 / dist
        grad_g = -offset / dist[:, None] ** 3
        outer = offset[:, :, None] * offset[:, None, :]
        hess_g = -np.eye(3) / dist[:, None, None] ** 3 + 3.0 * outer / dist[:, None, None] ** 5

        f = 1.0 / (self.phi_pole * phi)
        grad_f = -grad_phi / (self.phi_pole * phi[:, None] ** 2)
        hess_f = (
            2.0 * grad_phi[:, :, None] * grad_phi[:, None, :] / phi[:, None, None] ** 3
            - hess_phi / phi[:, None, None] ** 2
        ) / self.phi_pole

        cross = grad_f[:, :, None] * grad_g[:, None, :]
        grad_s = g[:, None] * grad_f + f[:, None] * grad_g
        hess_s = (
            g[:, None, None] * hess_f
            + cross
            + np.swapaxes(cross, 1, 2)
            + f[:, None, None] * hess_g
        )
        return -grad_s, -hess_s

    @property
    def u(self) -> NDArray[np.float64]:
        """u on the nodes; a node exactly at the pole holds -inf."""
        dist = _pole_distance(self.conformal_field)
        with np.errstate(divide="ignore"):
            singular = 1.0 - 1.0 / (self.phi_pole * self.conformal_field.phi * dist)
        return self.w + singular

    @property
    def noise_floor(self) -> float:
        """Finite-difference noise estimate of |Du|: rtol * max|w| / h."""
        return self.rtol * float(np.max(np.abs(self.w))) / self.spacing


def _pole_distance(conformal_field: ConformalField) -> NDArray[np.float64]:
    x, y, z = conformal_field.node_coordinates()
    ox, oy, oz = conformal_field.pole
    return np.sqrt((x - ox) ** 2 + (y - oy) ** 2 + (z - oz) ** 2)


def _laplacian(values: NDArray[np.float64], h: float) -> NDArray[np.float64]:
    """7-point flat Laplacian at the interior nodes."""
    c = values[1:-1, 1:-1, 1:-1]
    total = (
        values[2:, 1:-1, 1:-1]
        + values[:-2, 1:-1, 1:-1]
        + values[1:-1, 2:, 1:-1]
        + values[1:-1, :-2, 1:-1]
        + values[1:-1, 1:-1, 2:]
        + values[1:-1, 1:-1, :-2]
    )
    return (total - 6.0 * c) / h**2


def _face_coefficients(phi_sq: NDArray[np.float64]) -> tuple[NDArray[np.float64], ...]:
    inner = slice(1, -1)
    fx = 0.5 * (phi_sq[1:, inner, inner] + phi_sq[:-1, inner, inner])
    fy = 0.5 * (phi_sq[inner, 1:, inner] + phi_sq[inner, :-1, inner])
    fz = 0.5 * (phi_sq[inner, inner, 1:] + phi_sq[inner, inner, :-1])
    return fx, fy, fz


def _apply_operator(
    full: NDArray[np.float64],
    faces: tuple[NDArray[np.float64], ...],
    h: float,
) -> NDArray[np.float64]:
    """-div(phi^2 grad .) at interior nodes of a full N^3 array."""
    fx, fy, fz = faces
    c = full[1:-1, 1:-1, 1:-1]
    result = fx[1:] * (c - full[2:, 1:-1, 1:-1]) + fx[:-1] * (c - full[:-2, 1:-1, 1:-1])
    result += fy[:, 1:] * (c - full[1:-1, 2:, 1:-1]) + fy[:, :-1] * (
        c - full[1:-1, :-2, 1:-1]
    )
    result += fz[:, :, 1:] * (c - full[1:-1, 1:-1, 2:]) + fz[:, :, :-1] * (
        c - full[1:-1, 1:-1, :-2]
    )
    return result / h**2


def solve_green_3d(
    conformal_field: ConformalField,
    rtol: float = DEFAULT_RTOL,
    maxiter: int | None = None,
) -> GridPotentialSolution:
    if conformal_field.pole_distance_to_boundary() < MIN_POLE_CELLS:
        raise DomainError(
            f"Invalid pole: {conformal_field.pole}. Must be at least {MIN_POLE_CELLS} cells from the boundary"
        )

    n = conformal_field.resolution
    h = conformal_field.spacing
    interior_shape = (n - 2,) * 3
    size = (n - 2) ** 3
    if maxiter is None:
        maxiter = 20 * n

    phi_pole = float(conformal_field.phi_at(conformal_field.pole)[0])
    far_model = conformal_field.radial_model()
    far_field = solve_green(far_model, exterior=not far_model.is_complete)

    dist = _pole_distance(conformal_field)
    at_pole = dist < 1e-12 * h
    safe_dist = np.where(at_pole, h, dist)

    phi = conformal_field.phi
    singular = 1.0 - 1.0 / (phi_pole * phi * safe_dist)

    # A node on the pole carries the cell mean of 1/|x - o|
    inverse_dist = np.where(at_pole, CUBE_MEAN_INVERSE_DISTANCE / h, 1.0 / safe_dist)
    source = _laplacian(phi, h) * inverse_dist[1:-1, 1:-1, 1:-1] / phi_pole

    # Radial far field at |x - o| gives both boundary data and the initial guess
    lo, hi = far_field.radii[0], far_field.radii[-1]
    guess_dist = np.clip(safe_dist, lo, hi)
    w_guess = (1.0 - far_field.tail_values(guess_dist)) - singular

    boundary = w_guess.copy()
    boundary[1:-1, 1:-1, 1:-1] = 0.0

    phi_sq = phi**2
    faces = _face_coefficients(phi_sq)
    rhs = source - _apply_operator(boundary, faces, h)

    fx, fy, fz = faces
    diagonal = (
        fx[1:] + fx[:-1] + fy[:, 1:] + fy[:, :-1] + fz[:, :, 1:] + fz[:, :, :-1]
    ) / h**2

    def matvec(v: NDArray[np.float64]) -> NDArray[np.float64]:
        full = np.zeros((n, n, n))
        full[1:-1, 1:-1, 1:-1] = v.reshape(interior_shape)
        return _apply_operator(full, faces, h).ravel()

    operator = LinearOperator((size, size), matvec=matvec, dtype=np.float64)
    preconditioner = LinearOperator(
        (size, size), matvec=lambda v: v / diagonal.ravel(), dtype=np.float64
    )

    iterations = 0

    def count(_: NDArray[np.float64]) -> None:
        nonlocal iterations
        iterations += 1

    solution, info = cg(
        operator,
        rhs.ravel(),
        x0=w_guess[1:-1, 1:-1, 1:-1].ravel(),
        rtol=rtol,
        atol=0.0,
        maxiter=maxiter,
        M=preconditioner,
        callback=count,
    )
    if info != 0:
        raise ConvergenceError(
            f"Conjugate gradients did not reach rtol={rtol} within {maxiter} iterations "
            f"(info={info}, N={n})"
        )

    logger.debug("CG converged in %d iterations (N=%d, h=%.4g)", iterations, n, h)

    w = boundary
    w[1:-1, 1:-1, 1:-1] = solution.reshape(interior_shape)

    return GridPotentialSolution(
        conformal_field=conformal_field,
        w=w,
        phi_pole=phi_pole,
        iterations=iterations,
        rtol=rtol,
        far_field=far_field,
    )
