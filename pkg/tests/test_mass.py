import numpy as np
import pytest

from levelset_lab.exceptions import DomainError
from levelset_lab.mass import (
    PENROSE_COLUMNS,
    I_profile,
    Ip_limit,
    Ip_profile,
    MassReport,
    PenroseRow,
    adm_mass_profile,
    adm_mass_surface,
    endpoint_matches,
    fit_expansion,
    mass_report,
    penrose_check,
    penrose_row,
    penrose_trend,
)
from levelset_lab.metrics import MetricModel
from levelset_lab.potentials import solve_capacitary, solve_green


@pytest.fixture(scope="module")
def schwarzschild_exterior():
    return solve_green(MetricModel.schwarzschild(2.0), exterior=True)


@pytest.fixture(scope="module")
def penrose_rows():
    model = MetricModel.schwarzschild_with_horizon(1.0)
    return penrose_check(model, [2.5, 1.5, 2.0], with_limit=False, jobs=2)


def _row(p: float, beta_p: float, F_at_beta_p: float | None = None, H: float = 0.0) -> PenroseRow:
    return PenroseRow(
        p=p,
        Cap_p=1.0,
        c_p=1.0,
        beta_p=beta_p,
        two_m=2.0,
        horizon_area=16.0 * np.pi,
        sqrt_area_over_16pi=1.0,
        F_at_beta_p=F_at_beta_p if F_at_beta_p is not None else 4.0 * np.pi * beta_p,
        lower_bound=4.0 * np.pi * beta_p,
        F_limit=None,
        capacity_bound=beta_p,
        boundary_mean_curv=H,
    )


def test_adm_mass_profile_on_schwarzschild():
    """m(r) = m phi(r)^3 on Schwarzschild coordinate spheres."""
    model = MetricModel.schwarzschild(2.0)
    radii = np.array([1.0, 10.0])

    np.testing.assert_allclose(
        adm_mass_profile(model, radii), 2.0 * (1.0 + 1.0 / radii) ** 3, rtol=1e-14
    )


@pytest.mark.parametrize(
    "model, mass",
    [
        (MetricModel.flat(), 0.0),
        (MetricModel.schwarzschild(2.0), 2.0),
        (MetricModel.smoothed(1.0, 0.5), 1.0),
    ],
)
def test_adm_mass_surface_recovers_mass(model, mass):
    """The flux-integral mass extrapolates to the model's m."""
    assert adm_mass_surface(model) == pytest.approx(mass, abs=1e-6)


def test_fit_expansion_on_schwarzschild(schwarzschild_exterior):
    """The expansion coefficient of 1 - u fits to m."""
    mass_fit, residual = fit_expansion(schwarzschild_exterior)

    assert mass_fit == pytest.approx(2.0, abs=1e-3)
    assert residual < 1e-3


def test_fit_expansion_on_smoothed_green():
    """Quadrature tails give the same mass as the metric."""
    sol = solve_green(MetricModel.smoothed(1.0, 0.5))
    mass_fit, _ = fit_expansion(sol)

    assert mass_fit == pytest.approx(1.0, abs=1e-3)


def test_fit_expansion_on_capacitary_potential():
    """The p = 1.5 potential outside the horizon carries the same mass."""
    sol = solve_capacitary(MetricModel.schwarzschild_with_horizon(1.0), 1.5)
    mass_fit, _ = fit_expansion(sol)

    assert mass_fit == pytest.approx(1.0, abs=1e-3)


def test_fit_expansion_needs_four_radii(schwarzschild_exterior):
    """Fewer than four radii cannot support the fit."""
    with pytest.raises(ValueError) as excinfo:
        fit_expansion(schwarzschild_exterior, radii=[100.0, 200.0, 300.0])

    assert "need at least 4 points, got 3" in str(excinfo.value)


def test_I_profile_equals_F_over_four_pi_at_t_10(schwarzschild_exterior):
    """For p = 2 the I-form at r = 9 is F(10)/4 pi = 3.7."""
    values = I_profile(schwarzschild_exterior, [9.0])

    assert values[0] == pytest.approx(3.7, rel=1e-12)


def test_I_profile_tends_to_2m(schwarzschild_exterior):
    """I(r) -> 2m as r -> infinity."""
    values = I_profile(schwarzschild_exterior, [1e3, 1e4])

    assert abs(values[-1] - 4.0) < abs(values[0] - 4.0)
    assert values[-1] == pytest.approx(4.0, abs=1e-3)


def test_I_profile_rejects_capacitary_solution():
    """I_profile is the Green's function form."""
    sol = solve_capacitary(MetricModel.flat(inner_radius=1.0), 2.0)

    with pytest.raises(DomainError) as excinfo:
        I_profile(sol, [2.0])

    assert "needs a Green's function" in str(excinfo.value)


def test_Ip_profile_vanishes_on_flat_space():
    """F_p = 0 on flat space, and so does its integrand."""
    sol = solve_capacitary(MetricModel.flat(inner_radius=1.0), 1.5)

    np.testing.assert_allclose(Ip_profile(sol, [2.0, 10.0, 100.0]), 0.0, atol=1e-8)
    assert Ip_limit(sol) == 0.0


def test_Ip_limit_on_horizon():
    """2m c_p^(1-p) with c_2 = m from the horizon."""
    sol = solve_capacitary(MetricModel.schwarzschild_with_horizon(1.0), 2.0)

    assert Ip_limit(sol) == pytest.approx(2.0, rel=1e-8)
    assert Ip_profile(sol, [1e4])[0] == pytest.approx(2.0, rel=1e-3)


def test_Ip_profile_rejects_green_solution(schwarzschild_exterior):
    """Ip_profile needs a capacitary solution."""
    with pytest.raises(DomainError):
        Ip_profile(schwarzschild_exterior, [2.0])


def test_penrose_rows_are_sorted_and_bounded(penrose_rows):
    """beta_p <= 2m on the Schwarzschild horizon for every p."""
    assert [r.p for r in penrose_rows] == [1.5, 2.0, 2.5]
    for row in penrose_rows:
        assert row.boundary_is_minimal
        assert row.beta_bound_holds
        assert row.boundary_bound_holds
        assert row.capacity_bound == pytest.approx(row.beta_p, rel=1e-8)


def test_penrose_beta_2_equals_mass(penrose_rows):
    """The harmonic rung gives beta_2 = m."""
    row = next(r for r in penrose_rows if r.p == 2.0)

    assert row.beta_p == pytest.approx(1.0, rel=1e-8)
    assert row.c_p == pytest.approx(1.0, rel=1e-8)


def test_penrose_trend_and_endpoint(penrose_rows):
    """beta_p is nonincreasing in p and m = sqrt(|dM|/16 pi)."""
    model = MetricModel.schwarzschild_with_horizon(1.0)

    assert penrose_trend(penrose_rows)
    assert endpoint_matches(penrose_rows, model)
    for row in penrose_rows:
        assert row.horizon_area == pytest.approx(16.0 * np.pi, rel=1e-14)


def test_penrose_row_with_limit_reaches_8_pi_m():
    """lim F_p = 8 pi m closes the chain."""
    sol = solve_capacitary(MetricModel.schwarzschild_with_horizon(1.0), 2.0)
    row = penrose_row(sol, with_limit=True)

    assert row.F_limit == pytest.approx(8.0 * np.pi, rel=1e-3)
    assert row.F_at_beta_p >= row.lower_bound


def test_penrose_check_requires_boundary():
    """The capacitary ladder needs an inner sphere."""
    with pytest.raises(DomainError) as excinfo:
        penrose_check(MetricModel.schwarzschild(1.0), [2.0])

    assert "penrose_check needs a boundary" in str(excinfo.value)


def test_penrose_trend_detects_increase():
    """An increasing beta_p breaks the trend."""
    rows = [_row(1.5, 1.0), _row(2.0, 1.2)]

    assert not penrose_trend(rows)
    assert penrose_trend(list(reversed([_row(2.0, 0.9), _row(1.5, 1.0)])))


def test_penrose_row_flags():
    """Non-minimal boundaries are reported and bounds are tolerance-aware."""
    row = _row(2.0, 2.0 + 1e-10, H=0.3)

    assert not row.boundary_is_minimal
    assert row.beta_bound_holds
    assert not _row(2.0, 2.1).beta_bound_holds
    assert not _row(2.0, 1.0, F_at_beta_p=3.0 * np.pi).boundary_bound_holds


def test_mass_report_consistency_on_smoothed_model():
    """Three mass estimates agree to 1e-3 max(m, 1)."""
    report = mass_report(MetricModel.smoothed(1.0, 0.5))

    assert len(report.estimates) == 3
    assert report.consistency <= 1e-3
    assert report.adm_surface == pytest.approx(1.0, abs=1e-6)


def test_mass_report_consistency_and_estimates():
    """Missing estimates are skipped; consistency is the largest pairwise gap."""
    report = MassReport(adm_surface=1.0, adm_from_F=1.002, adm_from_fit=None)

    assert report.estimates == [1.0, 1.002]
    assert report.consistency == pytest.approx(0.002)
    assert MassReport(adm_surface=1.0, adm_from_F=None, adm_from_fit=None).consistency == 0.0


def test_mass_report_json_round_trip_and_csv(tmp_path, penrose_rows):
    """Reports with Penrose rows survive JSON and export one CSV row per p."""
    report = MassReport(
        adm_surface=1.0, adm_from_F=1.0, adm_from_fit=1.0, fit_residual=1e-9, penrose=penrose_rows
    )

    report.save_to_json(tmp_path, "mass")
    assert MassReport.load_from_json(tmp_path, "mass") == report

    lines = report.export_csv(tmp_path, "mass").read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(PENROSE_COLUMNS)
    assert len(lines) == 1 + len(penrose_rows)
    assert report.summary()["penrose"][0]["beta_bound_holds"] is True
