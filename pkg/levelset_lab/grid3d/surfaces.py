from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.typing import NDArray
from scipy.ndimage import map_coordinates
from skimage import measure

from ..exceptions import DegenerateLevelError
from ..logging_config import get_logger
from .solver import GridPotentialSolution

logger = get_logger(__name__)

REGULAR_FLOOR_FACTOR = 10.0


@dataclass(frozen=True)
class SurfaceIntegrals:
    flux: float
    int_grad2: float
    int_gradH: float


@dataclass(frozen=True)
class ExtractedSurface:
    """
    Triangulated level set {u = level}. Vertex quantities are metric ones:
    `grad_norm` is |grad u|_g = phi^-2 |Du| and `mean_curv` is H of the
    level set with respect to the infinity-pointing normal.
    """

    level: float
    vertices: NDArray[np.float64] = field(repr=False)
    faces: NDArray[np.int64] = field(repr=False)
    vertex_phi: NDArray[np.float64] = field(repr=False)
    grad_norm: NDArray[np.float64] = field(repr=False)
    mean_curv: NDArray[np.float64] = field(repr=False)
    euler_char: int

    @property
    def flat_areas(self) -> NDArray[np.float64]:
        v0, v1, v2 = (self.vertices[self.faces[:, i]] for i in range(3))
        return 0.5 * np.linalg.norm(np.cross(v1 - v0, v2 - v0), axis=1)

    def face_mean(self, values: NDArray[np.float64]) -> NDArray[np.float64]:
        return values[self.faces].mean(axis=1)

    @property
    def triangle_areas(self) -> NDArray[np.float64]:
        """Metric areas phi^4 dA with phi at the centroid."""
        return self.face_mean(self.vertex_phi) ** 4 * self.flat_areas

    @property
    def area(self) -> float:
        return float(self.triangle_areas.sum())

    @property
    def min_grad_norm(self) -> float:
        return float(self.grad_norm.min())

    def export_off(self, dest_dir: str | Path, filename: str) -> Path:
        """ASCII OFF: vertex list followed by triangle index list."""
        if not isinstance(dest_dir, Path):
            dest_dir = Path(dest_dir)

        dest_dir.mkdir(parents=True, exist_ok=True)
        filepath: Path = dest_dir / f"{filename}.off"

        with open(filepath, "w", encoding="utf-8") as f:
            f.write("OFF\n")
            f.write(f"{len(self.vertices)} {len(self.faces)} 0\n")
            np.savetxt(f, self.vertices, fmt="%.17g")
            np.savetxt(
                f,
                np.column_stack([np.full(len(self.faces), 3), self.faces]),
                fmt="%d",
            )

        return filepath


def euler_characteristic(faces: NDArray[np.int64], num_vertices: int) -> int:
    """V - E + F; raises when some edge does not bound exactly two triangles."""
    edges = np.sort(
        np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]]), axis=1
    )
    unique, counts = np.unique(edges, axis=0, return_counts=True)
    if np.any(counts != 2):
        raise DegenerateLevelError(
            f"Level surface is not closed: {int(np.sum(counts != 2))} boundary or "
            "non-manifold edges"
        )

    used = np.unique(faces).size
    if used != num_vertices:
        logger.debug("%d isolated vertices ignored", num_vertices - used)

    return int(used - len(unique) + len(faces))


def _interpolate(
    values: NDArray[np.float64], index_coords: NDArray[np.float64]
) -> NDArray[np.float64]:
    return map_coordinates(values, index_coords, order=1, mode="nearest")


def _hessian_at(
    gradient_nodes: list[NDArray[np.float64]],
    index_coords: NDArray[np.float64],
    h: float,
) -> NDArray[np.float64]:
    """(n, 3, 3) Hessian from nodal first derivatives, interpolated to points."""
    hessian = np.empty((index_coords.shape[1], 3, 3))
    for i in range(3):
        second = np.gradient(gradient_nodes[i], h)
        for j in range(i, 3):
            hessian[:, i, j] = _interpolate(second[j], index_coords)
            hessian[:, j, i] = hessian[:, i, j]
    return hessian


def extract_level_surface(
    sol: GridPotentialSolution,
    level: float,
    floor_factor: float = REGULAR_FLOOR_FACTOR,
) -> ExtractedSurface:
    conformal_field = sol.conformal_field
    h = sol.spacing
    u = sol.u

    finite = u[np.isfinite(u)]
    if not finite.min() < level < finite.max():
        raise DegenerateLevelError(f"Level {level} is outside the range of u on the grid")

    # The level must not reach the outermost layer of nodes
    shell = np.concatenate(
        [
            u[[0, -1], :, :].ravel(),
            u[:, [0, -1], :].ravel(),
            u[:, :, [0, -1]].ravel(),
        ]
    )
    if shell.min() <= level:
        raise DegenerateLevelError(
            f"Level {level} touches the box boundary (min u on the boundary {shell.min():.6g})"
        )

    filled = np.where(np.isfinite(u), u, finite.min() - 1.0)
    vertices, faces, _, _ = measure.marching_cubes(
        filled, level=level, spacing=(h, h, h), allow_degenerate=False
    )
    vertices = vertices + conformal_field.origin
    faces = faces.astype(np.int64)
    euler_char = euler_characteristic(faces, len(vertices))

    # Derivatives of the regular part by central differences, interpolated to vertices
    index_coords = ((vertices - conformal_field.origin) / h).T
    grad_w_nodes = np.gradient(sol.w, h)
    grad_w = np.stack([_interpolate(g, index_coords) for g in grad_w_nodes], axis=-1)

    phi_nodes = conformal_field.phi
    grad_phi_nodes = np.gradient(phi_nodes, h)
    phi = _interpolate(phi_nodes, index_coords)
    grad_phi = np.stack([_interpolate(g, index_coords) for g in grad_phi_nodes], axis=-1)
    hess_phi = _hessian_at(grad_phi_nodes, index_coords, h)

    hess_w = _hessian_at(grad_w_nodes, index_coords, h)
    grad_sing, hess_sing = sol.singular_derivatives(vertices, phi, grad_phi, hess_phi)
    grad_u = grad_w + grad_sing
    hess_u = hess_w + hess_sing

    flat_grad_norm = np.linalg.norm(grad_u, axis=1)
    normal = grad_u / flat_grad_norm[:, None]

    # H = phi^-2 (-D^2u(nu, nu)/|Du| + 2 d_nu phi / phi)
    hess_nn = np.einsum("ni,nij,nj->n", normal, hess_u, normal)
    d_nu_phi = np.einsum("ni,ni->n", normal, grad_phi)
    mean_curv = (-hess_nn / flat_grad_norm + 2.0 * d_nu_phi / phi) / phi**2
    grad_norm = flat_grad_norm / phi**2

    floor = floor_factor * sol.noise_floor
    if grad_norm.min() <= floor:
        raise DegenerateLevelError(
            f"Level {level} is near-critical: min |grad u| {grad_norm.min():.3e} "
            f"is below the regular-level floor {floor:.3e}"
        )

    logger.debug(
        "Level %.6g: %d vertices, %d faces, euler_char=%d",
        level,
        len(vertices),
        len(faces),
        euler_char,
    )

    return ExtractedSurface(
        level=level,
        vertices=vertices,
        faces=faces,
        vertex_phi=phi,
        grad_norm=grad_norm,
        mean_curv=mean_curv,
        euler_char=euler_char,
    )


def surface_integrals(surface: ExtractedSurface) -> SurfaceIntegrals:
    """Midpoint rule on triangles of int |grad u|, int |grad u|^2 and int |grad u| H."""
    areas = surface.triangle_areas
    grad = surface.face_mean(surface.grad_norm)
    curv = surface.face_mean(surface.mean_curv)

    return SurfaceIntegrals(
        flux=float(np.sum(grad * areas)),
        int_grad2=float(np.sum(grad**2 * areas)),
        int_gradH=float(np.sum(grad * curv * areas)),
    )
