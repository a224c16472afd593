import numpy as np
import pytest

from levelset_lab.exceptions import DomainError
from levelset_lab.metrics import MetricModel, conformal_factor
from levelset_lab.potentials import (
    SOLUTION_TABLE_HEADER,
    PotentialSolution,
    ProblemKind,
    RadialGrid,
    analytic_tail,
    capacity,
    cp_beta,
    richardson_derivative,
    solve_capacitary,
    solve_green,
    tail_exponents,
)


@pytest.fixture(scope="module")
def flat_green():
    return solve_green(MetricModel.flat())


@pytest.fixture(scope="module")
def schwarzschild_exterior():
    return solve_green(MetricModel.schwarzschild(2.0), exterior=True)


def test_radial_grid_defaults():
    """The default grid starts at r0 when there is a boundary and reaches 1e6 * scale."""
    grid = RadialGrid.for_model(MetricModel.schwarzschild_with_horizon(2.0))

    assert grid.r_min == 1.0
    assert grid.r_max == pytest.approx(2e6)
    assert grid.nodes.size == 4096


def test_radial_grid_avoids_schwarzschild_origin():
    """Without a boundary the Schwarzschild grid stays off r = 0."""
    grid = RadialGrid.for_model(MetricModel.schwarzschild(1.0))

    assert grid.r_min == pytest.approx(1e-3)


def test_radial_grid_rejects_reversed_bounds():
    """r_max must exceed r_min."""
    with pytest.raises(ValueError) as excinfo:
        RadialGrid(r_min=2.0, r_max=1.0)

    assert "Must be greater than r_min=2.0" in str(excinfo.value)


def test_tail_exponents_at_p_2():
    """beta = 2, gamma = -2 for the Laplacian."""
    assert tail_exponents(2.0) == (2.0, -2.0)


def test_analytic_tail_green_closed_form():
    """For p = 2 the tail is 1/(R + m/2)."""
    assert analytic_tail(100.0, 2.0, 2.0) == pytest.approx(1.0 / 101.0, rel=1e-14)


def test_flat_green_is_one_over_r(flat_green):
    """u = 1 - 1/r and |grad u| = 1/r^2 on Euclidean space."""
    assert flat_green.problem == ProblemKind.GREEN_POLE
    assert flat_green.tail(4.0) == pytest.approx(0.25, rel=1e-11)
    assert flat_green.grad_norm_at(4.0) == pytest.approx(1.0 / 16.0, rel=1e-15)
    assert flat_green.radius_of_t(7.0) == pytest.approx(7.0, rel=1e-10)


def test_schwarzschild_exterior_closed_form(schwarzschild_exterior):
    """m = 2: t = r + 1 and |grad u| = 0.0081 at t = 10."""
    sol = schwarzschild_exterior

    assert sol.exterior
    assert sol.radius_of_t(10.0) == pytest.approx(9.0, rel=1e-14)
    assert sol.grad_norm_at(9.0) == pytest.approx(0.0081, rel=1e-13)
    assert sol.level_of_t(10.0) == pytest.approx(0.9)


def test_green_flux_is_four_pi_everywhere(schwarzschild_exterior):
    """The integral of |grad u| over every coordinate sphere is 4 pi."""
    sol = schwarzschild_exterior

    assert sol.max_flux_defect() < 1e-11
    assert sol.flux_integral(3.0) == pytest.approx(4.0 * np.pi, rel=1e-13)


def test_smoothed_green_flux_identity():
    """u' of the solved potential is phi^2 |grad u| across the grid."""
    model = MetricModel.smoothed(1.0, 0.5)
    sol = solve_green(model)

    for r in np.geomspace(0.01, 1e4, 25):
        h = 1e-4 * r
        slope = -richardson_derivative(sol.tail, r, h)
        expected = sol.grad_norm_at(r) * conformal_factor(model, r) ** 2
        assert slope == pytest.approx(expected, rel=1e-8)

    assert sol.max_flux_defect() < 1e-10
    assert sol.t_range[0] < 0.05


def test_flux_defect_detects_a_foreign_tail(flat_green):
    """A tail integral solved for another metric breaks the flux identity."""
    sol = PotentialSolution(
        model=MetricModel.smoothed(1.0, 0.5),
        p_exponent=2.0,
        problem=ProblemKind.GREEN_POLE,
        c_p=1.0,
        tail_integral=flat_green.tail_integral,
    )

    assert sol.max_flux_defect() > 1e-3


def test_green_requires_exterior_flag_on_incomplete_chart():
    """Schwarzschild has no regular pole at the origin."""
    with pytest.raises(DomainError) as excinfo:
        solve_green(MetricModel.schwarzschild(1.0))

    assert "is not complete at the pole" in str(excinfo.value)


def test_t_outside_solved_range_raises(flat_green):
    """Levels beyond the grid are rejected with the solved range in the message."""
    with pytest.raises(DomainError) as excinfo:
        flat_green.radius_of_t(1e9)

    assert "Must lie in the solved range" in str(excinfo.value)


def test_negative_t_raises(flat_green):
    """t must be positive."""
    with pytest.raises(DomainError) as excinfo:
        flat_green.tail_of_t(-1.0)

    assert "Invalid t: -1.0" in str(excinfo.value)


def test_flat_capacity_of_unit_ball_is_four_pi():
    """Cap_2 of the unit sphere in R^3 is 4 pi."""
    sol = solve_capacitary(MetricModel.flat(inner_radius=1.0), 2.0)

    assert capacity(sol) == pytest.approx(4.0 * np.pi, rel=1e-10)
    assert sol.capacity == pytest.approx(capacity(sol))


@pytest.mark.parametrize("p", [1.2, 1.5, 2.0, 2.5])
def test_flat_beta_p_equals_boundary_radius(p):
    """On flat space beta_p = r0 for every p."""
    sol = solve_capacitary(MetricModel.flat(inner_radius=1.0), p)

    assert sol.beta_p == pytest.approx(1.0, rel=1e-8)
    assert sol.u(1.0) == pytest.approx(0.0, abs=1e-12)
    assert sol.max_flux_defect() < 1e-10


def test_schwarzschild_horizon_c2_and_beta2_equal_mass():
    """From the horizon r0 = m/2 the harmonic potential has c_2 = beta_2 = m."""
    sol = solve_capacitary(MetricModel.schwarzschild_with_horizon(2.0), 2.0)

    assert sol.c_p == pytest.approx(2.0, rel=1e-8)
    assert sol.beta_p == pytest.approx(2.0, rel=1e-8)


@pytest.mark.parametrize("p", [2.0 - 1e-6, 2.0 + 1e-6])
def test_capacitary_is_continuous_at_p_2(p):
    """p -> 2 recovers the harmonic capacitary potential."""
    model = MetricModel.schwarzschild_with_horizon(1.0)
    harmonic = solve_capacitary(model, 2.0)
    nearby = solve_capacitary(model, p)

    radii = np.geomspace(0.5, 1e4, 60)
    difference = max(abs(nearby.u(r) - harmonic.u(r)) for r in radii)

    assert difference < 1e-5


def test_cp_beta_recovers_solver_constants():
    """c_p and beta_p follow from the capacity alone."""
    sol = solve_capacitary(MetricModel.schwarzschild_with_horizon(1.0), 1.5)
    c_p, beta_p = cp_beta(sol)

    assert c_p == pytest.approx(sol.c_p, rel=1e-12)
    assert beta_p == pytest.approx(sol.beta_p, rel=1e-12)


def test_capacitary_requires_boundary():
    """Capacitary potentials need an inner sphere."""
    with pytest.raises(DomainError) as excinfo:
        solve_capacitary(MetricModel.flat(), 2.0)

    assert "has no inner_radius" in str(excinfo.value)


def test_capacitary_rejects_p_outside_range():
    """p must lie in (1, 3)."""
    with pytest.raises(ValueError) as excinfo:
        solve_capacitary(MetricModel.flat(inner_radius=1.0), 3.0)

    assert "Invalid p: 3.0" in str(excinfo.value)


def test_capacitary_rejects_grid_not_starting_at_boundary():
    """The grid must begin exactly at r0."""
    model = MetricModel.flat(inner_radius=1.0)

    with pytest.raises(DomainError) as excinfo:
        solve_capacitary(model, 2.0, grid=RadialGrid(r_min=0.5, r_max=1e4))

    assert "Must start at inner_radius=1.0" in str(excinfo.value)


def test_capacity_of_green_solution_raises(flat_green):
    """capacity is not defined for the Green's function."""
    with pytest.raises(DomainError):
        capacity(flat_green)


def test_export_csv_writes_metadata_and_table(tmp_path, schwarzschild_exterior):
    """CSV export has `# key: value` lines, the header and one row per node."""
    path = schwarzschild_exterior.export_csv(tmp_path, "green")

    lines = path.read_text(encoding="utf-8").splitlines()
    comments = [line for line in lines if line.startswith("#")]
    assert "# problem: GreenPole" in comments
    assert "# mass: 2.0" in comments
    assert lines[len(comments)] == SOLUTION_TABLE_HEADER

    table = np.loadtxt(path, delimiter=",", comments="#", skiprows=len(comments) + 1)
    assert table.shape == (schwarzschild_exterior.radii.size, 3)
    np.testing.assert_allclose(table[:, 0], schwarzschild_exterior.radii, rtol=1e-15)
