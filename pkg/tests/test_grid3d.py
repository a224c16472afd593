import numpy as np
import pytest

from levelset_lab.exceptions import DegenerateLevelError, DomainError
from levelset_lab.functionals import eval_F
from levelset_lab.grid3d import (
    ConformalField,
    euler_characteristic,
    extract_level_surface,
    solve_green_3d,
    surface_integrals,
)
from levelset_lab.metrics import MetricKind, MetricModel
from levelset_lab.potentials import solve_green

pytestmark = pytest.mark.slow

FOUR_PI = 4.0 * np.pi


@pytest.fixture(scope="module")
def flat_grid():
    field = ConformalField.from_model(MetricModel.flat(), side_length=16.0, resolution=48)
    return solve_green_3d(field)


@pytest.fixture(scope="module")
def smoothed_grid():
    model = MetricModel.smoothed(1.0, 2.0)
    field = ConformalField.from_model(model, side_length=24.0, resolution=64)
    return solve_green_3d(field)


def test_field_from_model_samples_phi_on_nodes():
    """phi[i, j, k] is the conformal factor at (x_i, y_j, z_k)."""
    model = MetricModel.smoothed(1.0, 0.5)
    field = ConformalField.from_model(model, side_length=20.0, resolution=16)

    assert field.phi.shape == (16, 16, 16)
    assert field.spacing == pytest.approx(20.0 / 15.0)
    assert field.kind == MetricKind.SMOOTHED_SCHWARZSCHILD
    assert field.radial_model() == model


def test_field_rejects_small_resolution():
    """Fewer than eight nodes per axis is not a grid."""
    with pytest.raises(ValueError) as excinfo:
        ConformalField(side_length=1.0, resolution=4, pole=(0, 0, 0), phi=np.ones((4, 4, 4)))

    assert "Invalid resolution: 4" in str(excinfo.value)


def test_field_rejects_pole_outside_box():
    """The pole must lie strictly inside the cube."""
    with pytest.raises(ValueError) as excinfo:
        ConformalField(side_length=2.0, resolution=8, pole=(1.5, 0, 0), phi=np.ones((8, 8, 8)))

    assert "Must lie inside the box" in str(excinfo.value)


def test_field_rejects_non_positive_phi():
    """phi is a conformal factor and must stay positive."""
    phi = np.ones((8, 8, 8))
    phi[3, 3, 3] = 0.0

    with pytest.raises(ValueError) as excinfo:
        ConformalField(side_length=2.0, resolution=8, pole=(0, 0, 0), phi=phi)

    assert "finite and positive" in str(excinfo.value)


def test_field_rejects_wrong_far_field():
    """The boundary shell must match 1 + m/(2|x|) for the declared mass."""
    model = MetricModel.schwarzschild(2.0)
    phi = ConformalField.from_model(model, side_length=20.0, resolution=16).phi

    with pytest.raises(ValueError) as excinfo:
        ConformalField(side_length=20.0, resolution=16, pole=(0, 0, 0), phi=phi, mass=0.0)

    assert "deviates by" in str(excinfo.value)


def test_raw_round_trip(tmp_path):
    """The .f8 block and its YAML header reproduce the field."""
    field = ConformalField.from_model(
        MetricModel.smoothed(2.0, 1.0), side_length=30.0, resolution=12, pole=(1.0, -2.0, 0.5)
    )

    data_path, header_path = field.save_raw(tmp_path, "phi")
    loaded = ConformalField.load_raw(tmp_path, "phi")

    assert data_path.stat().st_size == 8 * 12**3
    assert "N: 12" in header_path.read_text(encoding="utf-8")
    assert loaded == field
    np.testing.assert_array_equal(loaded.phi, field.phi)


def test_load_raw_missing_file(tmp_path):
    """A missing block names the path."""
    with pytest.raises(FileNotFoundError) as excinfo:
        ConformalField.load_raw(tmp_path, "absent")

    assert "absent.f8" in str(excinfo.value)


def test_load_raw_rejects_truncated_block(tmp_path):
    """The block must hold exactly N^3 values."""
    field = ConformalField.from_model(MetricModel.flat(), side_length=10.0, resolution=8)
    data_path, _ = field.save_raw(tmp_path, "phi")
    data_path.write_bytes(data_path.read_bytes()[:-8])

    with pytest.raises(ValueError) as excinfo:
        ConformalField.load_raw(tmp_path, "phi")

    assert "Must be N^3 = 512" in str(excinfo.value)


def test_pole_too_close_to_boundary():
    """The pole needs ten cells of room on every side."""
    field = ConformalField.from_model(
        MetricModel.flat(), side_length=16.0, resolution=32, pole=(7.0, 0.0, 0.0)
    )

    with pytest.raises(DomainError) as excinfo:
        solve_green_3d(field)

    assert "cells from the boundary" in str(excinfo.value)


def test_flat_singular_part_is_the_whole_solution(flat_grid):
    """phi = 1 is harmonic, so the regular part vanishes."""
    np.testing.assert_allclose(flat_grid.w, 0.0, atol=1e-12)
    assert flat_grid.phi_pole == pytest.approx(1.0)


def test_singular_derivatives_on_flat_space(flat_grid):
    """grad u_sing = (x - o)/|x - o|^3 and its Hessian is trace free."""
    points = np.array([[3.0, 0.0, 0.0], [1.0, 2.0, -2.0]])
    grad, hess = flat_grid.singular_derivatives(
        points, np.ones(2), np.zeros((2, 3)), np.zeros((2, 3, 3))
    )

    np.testing.assert_allclose(grad[0], [1.0 / 9.0, 0.0, 0.0], rtol=1e-14)
    np.testing.assert_allclose(grad[1], points[1] / 27.0, rtol=1e-14)
    np.testing.assert_allclose(np.trace(hess, axis1=1, axis2=2), 0.0, atol=1e-15)


def test_conformal_singular_derivatives_match_finite_differences(smoothed_grid):
    """Gradient and Hessian of 1 - 1/(phi(o) phi(x) |x - o|) for a radial phi."""
    profile = smoothed_grid.conformal_field.radial_model().conformal_profile
    phi_pole = smoothed_grid.phi_pole

    def u_sing(x):
        r = np.linalg.norm(x)
        return 1.0 - 1.0 / (phi_pole * profile.value(r) * r)

    x = np.array([2.0, -1.5, 3.0])
    r = np.linalg.norm(x)
    unit = x / r
    dphi, d2phi = profile.derivative(r), profile.second_derivative(r)
    hess_phi = d2phi * np.outer(unit, unit) + dphi / r * (np.eye(3) - np.outer(unit, unit))

    grad, hess = smoothed_grid.singular_derivatives(
        x[None, :], np.array([profile.value(r)]), (dphi * unit)[None, :], hess_phi[None]
    )

    h = 1e-4
    steps = h * np.eye(3)
    fd_grad = np.array([(u_sing(x + e) - u_sing(x - e)) / (2 * h) for e in steps])
    fd_hess = np.array(
        [
            [
                (u_sing(x + a + b) - u_sing(x + a - b) - u_sing(x - a + b) + u_sing(x - a - b))
                / (4 * h * h)
                for b in steps
            ]
            for a in steps
        ]
    )

    np.testing.assert_allclose(grad[0], fd_grad, rtol=1e-6)
    np.testing.assert_allclose(hess[0], fd_hess, rtol=1e-4, atol=1e-7)


def test_flat_grid_level_is_a_sphere(flat_grid):
    """On flat space the level t = 4 is the sphere of radius 4."""
    surface = extract_level_surface(flat_grid, 0.75)
    radii = np.linalg.norm(surface.vertices, axis=1)

    assert surface.euler_char == 2
    np.testing.assert_allclose(radii, 4.0, rtol=2e-2)
    np.testing.assert_allclose(surface.mean_curv, 0.5, rtol=5e-2)


def test_flat_grid_flux_and_F(flat_grid):
    """Flux within 2% of 4 pi and F near zero."""
    t = 4.0
    sample = eval_F(flat_grid, t)

    assert sample.flux == pytest.approx(FOUR_PI, rel=0.02)
    assert abs(sample.F_value) < 0.02 * FOUR_PI * t
    assert sample.euler_char == 2


def test_surface_integrals_are_consistent(flat_grid):
    """int |grad u|^2 ~ flux / t^2 on a flat level sphere."""
    surface = extract_level_surface(flat_grid, 0.8)
    integrals = surface_integrals(surface)

    assert integrals.int_grad2 == pytest.approx(integrals.flux / 25.0, rel=0.05)
    assert surface.area == pytest.approx(FOUR_PI * 25.0, rel=0.02)


def test_level_touching_boundary_is_degenerate(flat_grid):
    """The level t = 10 crosses the faces of the L = 16 box."""
    with pytest.raises(DegenerateLevelError) as excinfo:
        extract_level_surface(flat_grid, 0.9)

    assert "touches the box boundary" in str(excinfo.value)


def test_level_outside_range_is_degenerate(flat_grid):
    """u < 1 everywhere."""
    with pytest.raises(DegenerateLevelError) as excinfo:
        extract_level_surface(flat_grid, 2.0)

    assert "outside the range of u" in str(excinfo.value)


def test_export_off(tmp_path, flat_grid):
    """OFF header counts match the arrays."""
    surface = extract_level_surface(flat_grid, 0.75)
    path = surface.export_off(tmp_path, "level")

    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "OFF"
    assert lines[1] == f"{len(surface.vertices)} {len(surface.faces)} 0"
    assert lines[-1].startswith("3 ")
    assert len(lines) == 2 + len(surface.vertices) + len(surface.faces)


def test_euler_characteristic():
    """A tetrahedron is a sphere; a lone triangle is not closed."""
    tetra = np.array([[0, 1, 2], [0, 3, 1], [1, 3, 2], [0, 2, 3]])

    assert euler_characteristic(tetra, 4) == 2
    with pytest.raises(DegenerateLevelError) as excinfo:
        euler_characteristic(np.array([[0, 1, 2]]), 3)

    assert "not closed" in str(excinfo.value)


def test_smoothed_grid_matches_radial_solution(smoothed_grid):
    """With the pole at the origin the grid F agrees with the radial F."""
    t = 6.0
    radial = eval_F(solve_green(MetricModel.smoothed(1.0, 2.0)), t)
    sample = eval_F(smoothed_grid, t)

    assert sample.flux == pytest.approx(FOUR_PI, rel=0.02)
    assert sample.F_value == pytest.approx(radial.F_value, rel=0.1)
    assert smoothed_grid.iterations > 0
