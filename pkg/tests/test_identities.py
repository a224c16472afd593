import json

import numpy as np
import pytest

from levelset_lab.exceptions import DomainError
from levelset_lab.functionals import eval_F
from levelset_lab.identities import (
    IDENTITY_COLUMNS,
    IdentitySample,
    IdentityTag,
    check_divX,
    check_integral,
    check_meancurv,
    default_identity_radii,
    divX_bochner,
    divX_finite_difference,
    divX_geometric,
    export_identity_csv,
    flux_of_X,
    identity_suite,
    save_identity_json,
)
from levelset_lab.identities.checks import TOLERANCES
from levelset_lab.identities.reports import relative_error
from levelset_lab.metrics import MetricModel
from levelset_lab.potentials import solve_capacitary, solve_green


@pytest.fixture(scope="module")
def schwarzschild_exterior():
    return solve_green(MetricModel.schwarzschild(2.0), exterior=True)


@pytest.fixture(scope="module")
def smoothed_green():
    return solve_green(MetricModel.smoothed(1.0, 0.5))


def test_divX_at_r_9_on_schwarzschild(schwarzschild_exterior):
    """div X = 0.81 * 0.000243 at r = 9 (t = 10) for m = 2."""
    expected = 0.81 * 0.000243

    assert divX_geometric(schwarzschild_exterior, 9.0) == pytest.approx(expected, rel=1e-10)
    assert divX_bochner(schwarzschild_exterior, 9.0) == pytest.approx(expected, rel=1e-10)
    assert divX_finite_difference(schwarzschild_exterior, 9.0) == pytest.approx(
        expected, rel=1e-6
    )


def test_flux_of_X_is_F_over_four_pi(schwarzschild_exterior):
    """4 pi rho^2 X_s at u = 1 - 1/t equals F(t)."""
    flux = flux_of_X(schwarzschild_exterior, 9.0)

    F_value = eval_F(schwarzschild_exterior, 10.0).F_value

    assert 4.0 * np.pi * flux == pytest.approx(F_value, rel=1e-12)


@pytest.mark.parametrize(
    "tag", [IdentityTag.DIVX_GEOMETRIC, IdentityTag.DIVX_BOCHNER, IdentityTag.GAUSS_REWRITE]
)
@pytest.mark.parametrize("r", [0.05, 0.7, 3.0, 40.0])
def test_check_divX_on_smoothed_model(smoothed_green, tag, r):
    """Every divergence form agrees within its tolerance."""
    sample = check_divX(smoothed_green, r, tag)

    assert sample.tag == tag
    assert sample.relerr < TOLERANCES[tag]
    assert not sample.flagged


def test_gauss_rewrite_on_flat_space_is_exact():
    """On Euclidean spheres both sides reduce to -H^2/2 with Ric = R = 0."""
    sol = solve_green(MetricModel.flat())
    sample = check_divX(sol, 2.0, IdentityTag.GAUSS_REWRITE)

    assert sample.lhs == pytest.approx(-0.5, rel=1e-12)
    assert sample.rhs == pytest.approx(-0.5, rel=1e-12)
    assert sample.relerr < 1e-6


def test_check_divX_rejects_mean_curvature_tag(smoothed_green):
    """The mean curvature identity has its own check."""
    with pytest.raises(ValueError) as excinfo:
        check_divX(smoothed_green, 1.0, IdentityTag.MEAN_CURV_HARMONIC)

    assert "Use check_meancurv" in str(excinfo.value)


def test_divergence_identities_need_green_function():
    """X is built from the Green's function."""
    sol = solve_capacitary(MetricModel.flat(inner_radius=1.0), 2.0)

    with pytest.raises(DomainError) as excinfo:
        check_divX(sol, 2.0, IdentityTag.DIVX_GEOMETRIC)

    assert "need a GreenPole solution" in str(excinfo.value)


def test_meancurv_on_flat_space():
    """H = 2/r equals -D^2u(nu,nu)/|Du| for u = 1 - 1/r."""
    sol = solve_green(MetricModel.flat())
    sample = check_meancurv(sol, 4.0)

    assert sample.lhs == pytest.approx(0.5)
    assert sample.relerr < TOLERANCES[IdentityTag.MEAN_CURV_HARMONIC]


@pytest.mark.parametrize("p", [1.5, 2.0, 2.5])
def test_meancurv_on_capacitary_potentials(p):
    """The p-harmonic form carries the factor p - 1."""
    sol = solve_capacitary(MetricModel.schwarzschild_with_horizon(1.0), p)
    sample = check_meancurv(sol, 3.0)

    assert sample.relerr < TOLERANCES[IdentityTag.MEAN_CURV_HARMONIC]


def test_integral_identity_on_schwarzschild(schwarzschild_exterior):
    """int div X between the levels t = 2 and t = 20 equals F(20) - F(2) = 4 pi * 1.35."""
    check = check_integral(schwarzschild_exterior, 2.0, 20.0)

    assert check.rhs == pytest.approx(4.0 * np.pi * 1.35, rel=1e-12)
    assert check.relerr < 1e-8
    assert not check.flagged


def test_integral_identity_on_smoothed_model(smoothed_green):
    """The coarea form holds where R > 0 contributes."""
    check = check_integral(smoothed_green, 0.5, 5.0)

    assert check.relerr < 1e-8


def test_integral_identity_rejects_reversed_levels(schwarzschild_exterior):
    """s must be below t."""
    with pytest.raises(ValueError) as excinfo:
        check_integral(schwarzschild_exterior, 5.0, 2.0)

    assert "Must satisfy 0 < s < t" in str(excinfo.value)


def test_identity_suite_order_and_tolerances(smoothed_green):
    """Four samples per radius, in radius order, none flagged."""
    radii = default_identity_radii(smoothed_green, num=8)
    samples = identity_suite(smoothed_green, radii, jobs=3)

    assert len(samples) == 32
    assert [s.r for s in samples[::4]] == pytest.approx(list(radii))
    assert [s.tag for s in samples[:4]] == [
        IdentityTag.DIVX_GEOMETRIC,
        IdentityTag.DIVX_BOCHNER,
        IdentityTag.MEAN_CURV_HARMONIC,
        IdentityTag.GAUSS_REWRITE,
    ]
    assert not any(s.flagged for s in samples)


def test_default_identity_radii_stay_inside_solved_range(schwarzschild_exterior):
    """Radii sit strictly inside the grid and below 1e2 * max(m, 1)."""
    radii = default_identity_radii(schwarzschild_exterior)

    assert radii.size == 100
    assert radii[0] > schwarzschild_exterior.radii[0]
    assert radii[-1] == pytest.approx(200.0)


def test_relative_error_floor_scales_with_magnitude():
    """Near-cancelling right-hand sides are measured against the term sizes."""
    assert relative_error(1.0, 2.0) == pytest.approx(0.5)
    assert relative_error(1e-12, 0.0) == pytest.approx(1e-3)
    assert relative_error(1e-12, 0.0, magnitude=1e3) == pytest.approx(1e-6)


def test_identity_sample_rejects_non_positive_radius():
    """Samples live at positive radii."""
    with pytest.raises(ValueError) as excinfo:
        IdentitySample(r=0.0, tag="GaussRewrite", lhs=0.0, rhs=0.0, relerr=0.0, tolerance=1e-6)

    assert "Invalid r: 0.0" in str(excinfo.value)


def test_identity_exports(tmp_path, schwarzschild_exterior):
    """CSV rows carry the tag name; JSON holds samples and integrals."""
    samples = identity_suite(schwarzschild_exterior, [5.0, 9.0])
    integrals = [check_integral(schwarzschild_exterior, 2.0, 20.0)]

    path = export_identity_csv(samples, tmp_path, "identities")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(IDENTITY_COLUMNS)
    assert lines[1].split(",")[1] == "DivX_Geometric"
    assert len(lines) == 9

    save_identity_json(samples, integrals, tmp_path, "identities")
    with open(tmp_path / "identities.json", encoding="utf-8") as f:
        data = json.load(f)
    assert len(data["samples"]) == 8
    assert data["integrals"][0]["s"] == 2.0
