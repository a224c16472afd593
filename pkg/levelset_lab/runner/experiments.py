"""
One experiment per configuration: solve, evaluate, assert, write.

Every assertion is recorded with its measured value and threshold; the
experiment passes when all required assertions pass. Informational records
(required=False) document hypotheses such as R >= 0 without failing a run.
"""

from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np
from numpy.typing import NDArray

from ..exceptions import ConfigError, DomainError, SolverError
from ..functionals import (
    MonotonicityReport,
    default_t_grid,
    derivative_checks,
    eval_F,
    evaluate,
    sweep,
)
from ..grid3d import ConformalField, extract_level_surface, solve_green_3d
from ..identities import (
    IdentityTag,
    check_integral,
    check_meancurv,
    default_identity_radii,
    identity_suite,
)
from ..identities.checks import INTEGRAL_TOLERANCE, TOLERANCES
from ..logging_config import get_logger
from ..mass import (
    I_profile,
    Ip_limit,
    Ip_profile,
    MassReport,
    adm_mass_surface,
    endpoint_matches,
    fit_expansion,
    mass_report,
    penrose_check,
    penrose_trend,
)
from ..metrics import (
    MetricKind,
    MetricModel,
    default_audit_radii,
    scalar_curvature_profile,
)
from ..potentials import (
    PotentialSolution,
    RadialGrid,
    capacity,
    solve_capacitary,
    solve_green,
)
from .config import ExperimentConfig, OracleQuantity, RunMode, load_config
from .writer import ReportWriter

logger = get_logger(__name__)

EXIT_PASS = 0
EXIT_ASSERTION = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3

FOUR_PI = 4.0 * np.pi
FLUX_RTOL = 1e-10
FLAT_F_TOL = 1e-10
MASS_RTOL = 1e-3
DERIVATIVE_RTOL = 1e-6
I_LIMIT_RTOL = 1e-2
GRID_FLUX_RTOL = 0.02
CURVATURE_FLOOR = -1e-12


@dataclass(frozen=True)
class AssertionRecord:
    name: str
    passed: bool
    measured: float | None = None
    threshold: float | None = None
    detail: str = ""
    required: bool = True


@dataclass
class ExperimentResult:
    name: str
    mode: RunMode
    assertions: list[AssertionRecord] = field(default_factory=list)
    results: dict[str, Any] = field(default_factory=dict)
    files: list[Path] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions if a.required)

    @property
    def failures(self) -> list[AssertionRecord]:
        return [a for a in self.assertions if a.required and not a.passed]

    @property
    def exit_code(self) -> int:
        return EXIT_PASS if self.passed else EXIT_ASSERTION

    def summary(self, model: MetricModel) -> dict[str, Any]:
        return {
            "experiment": self.name,
            "mode": str(self.mode),
            "metric": model.describe(),
            "passed": self.passed,
            "num_assertions": len(self.assertions),
            "num_failed": len(self.failures),
            "assertions": [asdict(a) for a in self.assertions],
            "results": self.results,
        }


def _relative(measured: float, expected: float) -> float:
    return abs(measured - expected) / max(abs(expected), 1e-300)


class Experiment:
    def __init__(
        self,
        config: ExperimentConfig,
        jobs: int = 1,
        tol_scale: float = 1.0,
        out_dir: str | Path | None = None,
    ) -> None:
        if tol_scale <= 0:
            raise ConfigError(f"Invalid tol_scale: {tol_scale}. Must be positive")

        self.config = config
        self.jobs = max(jobs, 1)
        self.tol_scale = tol_scale
        self.model = config.metric.to_model()
        self.writer = ReportWriter(
            out_dir if out_dir is not None else config.output.directory,
            config.name,
            config.output.formats,
        )
        self._result: ExperimentResult | None = None
        self._capacitary: dict[float, PotentialSolution] = {}
        self._green: PotentialSolution | None = None
        self.curvature_nonnegative = True

    # ---------------------------------------------------------------------
    # Bookkeeping
    # ---------------------------------------------------------------------

    @property
    def result(self) -> ExperimentResult:
        assert self._result is not None
        return self._result

    def scaled(self, tolerance: float) -> float:
        return tolerance * self.tol_scale

    def check(
        self,
        name: str,
        passed: bool,
        measured: float | None = None,
        threshold: float | None = None,
        detail: str = "",
        required: bool = True,
    ) -> AssertionRecord:
        record = AssertionRecord(
            name=name,
            passed=bool(passed),
            measured=None if measured is None else float(measured),
            threshold=None if threshold is None else float(threshold),
            detail=detail,
            required=required,
        )
        self.result.assertions.append(record)
        logger.info(
            "%s %s (measured %s, threshold %s)",
            "PASS" if record.passed else ("FAIL" if required else "NOTE"),
            name,
            record.measured,
            record.threshold,
        )
        return record

    @property
    def mass(self) -> float:
        return self.model.mass_param

    @property
    def mass_scale(self) -> float:
        return max(abs(self.mass), 1.0)

    # ---------------------------------------------------------------------
    # Solutions
    # ---------------------------------------------------------------------

    def radial_grid(self) -> RadialGrid:
        solver = self.config.solver
        return RadialGrid.for_model(
            self.model, num_nodes=solver.num_nodes, r_max=solver.r_max
        )

    def green(self) -> PotentialSolution:
        if self._green is None:
            exterior = self.config.solver.exterior
            if exterior is None:
                exterior = not self.model.is_complete
            self._green = solve_green(self.model, self.radial_grid(), exterior=exterior)
        return self._green

    def capacitary(self, p: float) -> PotentialSolution:
        if p not in self._capacitary:
            self._capacitary[p] = solve_capacitary(self.model, p, self.radial_grid())
        return self._capacitary[p]

    def t_grid(self, sol: PotentialSolution) -> NDArray[np.float64]:
        grid_config = self.config.run.t_grid
        if grid_config.values is not None:
            return np.asarray(grid_config.values, dtype=np.float64)

        default = default_t_grid(sol, num=grid_config.num, t_max=grid_config.t_max)
        lower = default[0] if grid_config.t_min is None else max(grid_config.t_min, default[0])
        return np.geomspace(lower, default[-1], grid_config.num)

    # ---------------------------------------------------------------------
    # Shared checks
    # ---------------------------------------------------------------------

    def audit_curvature(self) -> None:
        _, r_min = scalar_curvature_profile(self.model, default_audit_radii(self.model))
        self.curvature_nonnegative = r_min >= CURVATURE_FLOOR
        self.result.results["min_scalar_curvature"] = r_min
        self.check(
            "scalar_curvature_nonnegative",
            self.curvature_nonnegative,
            measured=r_min,
            threshold=CURVATURE_FLOOR,
            detail="hypothesis of the monotonicity theorem",
            required=False,
        )

    def check_sweep(self, sol: PotentialSolution, report: MonotonicityReport, label: str) -> None:
        self.check(
            f"{label}.monotone",
            report.is_monotone,
            measured=len(report.violations),
            threshold=0,
            detail=f"tolerance {report.tolerance:g}",
        )

        defect = sol.max_flux_defect()
        self.check(
            f"{label}.flux_identity",
            defect <= self.scaled(FLUX_RTOL),
            measured=defect,
            threshold=self.scaled(FLUX_RTOL),
        )

        if self.model.kind == MetricKind.FLAT and sol.capacity is None:
            worst = max(abs(s.F_value) for s in report.samples)
            self.check(
                f"{label}.flat_rigidity",
                worst < self.scaled(FLAT_F_TOL),
                measured=worst,
                threshold=self.scaled(FLAT_F_TOL),
            )

        if sol.capacity is None and self.model.is_complete and report.samples:
            first = report.samples[0]
            bound = FOUR_PI * first.t
            self.check(
                f"{label}.pole_limit",
                abs(first.F_value) <= bound,
                measured=abs(first.F_value),
                threshold=bound,
            )

        limit = report.limit_estimate
        if limit is not None and self.curvature_nonnegative:
            self.check(
                f"{label}.limit_nonnegative",
                limit >= -1e-9,
                measured=limit,
                threshold=-1e-9,
            )

        if (
            self.config.run.check_limit
            and limit is not None
            and self.mass > 0
            and self.curvature_nonnegative
        ):
            error = abs(limit / (8.0 * np.pi) - self.mass) / self.mass
            self.check(
                f"{label}.mass_limit",
                error <= self.scaled(MASS_RTOL),
                measured=error,
                threshold=self.scaled(MASS_RTOL),
                detail=f"limit/8pi = {limit / (8.0 * np.pi):.10g}, m = {self.mass:g}",
            )

        if self.config.run.derivative_check:
            checks = derivative_checks(sol, jobs=self.jobs)
            worst = max(c.relerr for c in checks)
            self.check(
                f"{label}.derivative_identity",
                worst < self.scaled(DERIVATIVE_RTOL),
                measured=worst,
                threshold=self.scaled(DERIVATIVE_RTOL),
                detail=f"{len(checks)} levels",
            )
            self.writer.write_table(
                ["t", "lhs", "rhs", "relerr"],
                [[c.t, c.lhs, c.rhs, c.relerr] for c in checks],
                f"{label}_derivative",
            )

        self.result.results[label] = report.summary()

    def check_oracles(self) -> None:
        for i, oracle in enumerate(self.config.run.oracles):
            if oracle.quantity == OracleQuantity.F:
                assert oracle.t is not None
                sol = self.green() if oracle.p is None else self.capacitary(oracle.p)
                measured = evaluate(sol, oracle.t).F_value
                name = f"oracle[{i}].F(t={oracle.t:g})"
            else:
                if oracle.p is None:
                    raise ConfigError(
                        f"Missing required key: 'p' for a {oracle.quantity} oracle",
                        field=f"run.oracles[{i}].p",
                    )
                sol = self.capacitary(oracle.p)
                beta_p = sol.beta_p
                assert beta_p is not None
                measured = {
                    OracleQuantity.CAP_P: capacity(sol),
                    OracleQuantity.C_P: sol.c_p,
                    OracleQuantity.BETA_P: beta_p,
                }[oracle.quantity]
                name = f"oracle[{i}].{oracle.quantity}(p={oracle.p:g})"

            error = abs(measured - oracle.expected)
            self.check(
                name,
                error <= self.scaled(oracle.tol),
                measured=measured,
                threshold=self.scaled(oracle.tol),
                detail=f"expected {oracle.expected!r}, |error| {error:.3e}",
            )

    # ---------------------------------------------------------------------
    # Modes
    # ---------------------------------------------------------------------

    def run_solve(self) -> None:
        if self.model.is_complete or self.config.solver.exterior:
            sol = self.green()
            self.writer.write_solution(sol, "green")
            defect = sol.max_flux_defect()
            self.check(
                "green.flux_identity",
                defect <= self.scaled(FLUX_RTOL),
                measured=defect,
                threshold=self.scaled(FLUX_RTOL),
            )
            self.result.results["green"] = sol.metadata()

        for p in self.config.run.p_list:
            sol = self.capacitary(p)
            self.writer.write_solution(sol, f"p{p:g}")
            defect = sol.max_flux_defect()
            self.check(
                f"p={p:g}.flux_identity",
                defect <= self.scaled(FLUX_RTOL),
                measured=defect,
                threshold=self.scaled(FLUX_RTOL),
            )
            self.result.results[f"p={p:g}"] = sol.metadata()

    def run_green_sweep(self) -> None:
        sol = self.green()
        report = sweep(
            sol, self.t_grid(sol), tol=self.scaled(self.config.solver.tolerance), jobs=self.jobs
        )
        self.writer.write_sweep(report, "green")
        self.check_sweep(sol, report, "green")

    def run_p_sweep(self) -> None:
        for p in self.config.run.p_list:
            sol = self.capacitary(p)
            report = sweep(
                sol,
                self.t_grid(sol),
                tol=self.scaled(self.config.solver.tolerance),
                jobs=self.jobs,
            )
            label = f"p{p:g}"
            self.writer.write_sweep(report, label)
            self.check_sweep(sol, report, label)

    def run_adm(self) -> None:
        report = mass_report(self.model, jobs=self.jobs)
        self.writer.write_mass(report, "mass")
        self.result.results["mass"] = report.summary()

        threshold = self.scaled(MASS_RTOL) * self.mass_scale
        self.check(
            "adm.consistency",
            report.consistency <= threshold,
            measured=report.consistency,
            threshold=threshold,
        )
        error = abs(report.adm_surface - self.mass)
        self.check(
            "adm.surface_matches_mass",
            error <= threshold,
            measured=report.adm_surface,
            threshold=threshold,
            detail=f"m = {self.mass:g}",
        )
        if self.curvature_nonnegative and report.adm_from_F is not None:
            self.check(
                "adm.positivity",
                report.adm_from_F >= -1e-9,
                measured=report.adm_from_F,
                threshold=-1e-9,
            )
        if self.model.kind == MetricKind.FLAT:
            worst = max(abs(m) for m in report.estimates)
            self.check(
                "adm.flat_rigidity",
                worst <= self.scaled(1e-6),
                measured=worst,
                threshold=self.scaled(1e-6),
            )

    def run_penrose(self) -> None:
        rows = penrose_check(
            self.model, self.config.run.p_list, grid=self.radial_grid(), jobs=self.jobs
        )
        report = MassReport(
            adm_surface=adm_mass_surface(self.model),
            adm_from_F=None,
            adm_from_fit=None,
            penrose=rows,
        )
        self.writer.write_mass(report, "penrose")
        self.result.results["penrose"] = report.summary()

        minimal = all(r.boundary_is_minimal for r in rows)
        for r in rows:
            label = f"penrose.p={r.p:g}"
            self.check(
                f"{label}.beta_p_le_2m",
                r.beta_bound_holds,
                measured=r.beta_p,
                threshold=r.two_m + r.tolerance,
                required=r.boundary_is_minimal,
            )
            self.check(
                f"{label}.boundary_bound",
                r.boundary_bound_holds,
                measured=r.F_at_beta_p,
                threshold=r.lower_bound,
                required=r.boundary_is_minimal,
            )
            self.check(
                f"{label}.capacity_form",
                _relative(r.capacity_bound, r.beta_p) <= self.scaled(1e-8),
                measured=r.capacity_bound,
                threshold=self.scaled(1e-8),
            )
            if self.config.run.check_limit and r.F_limit is not None and self.mass > 0:
                error = abs(r.F_limit / (8.0 * np.pi) - self.mass) / self.mass
                self.check(
                    f"{label}.mass_limit",
                    error <= self.scaled(MASS_RTOL),
                    measured=error,
                    threshold=self.scaled(MASS_RTOL),
                )

        self.check(
            "penrose.beta_p_nonincreasing",
            penrose_trend(rows),
            measured=None,
            detail=", ".join(f"{r.p:g}:{r.beta_p:.10g}" for r in rows),
            required=minimal,
        )
        if self.model.kind == MetricKind.SCHWARZSCHILD_ISOTROPIC:
            self.check(
                "penrose.horizon_area_equality",
                endpoint_matches(rows, self.model),
                measured=rows[0].sqrt_area_over_16pi if rows else None,
                threshold=1e-12,
                detail=f"m = {self.mass:g}",
            )

    def default_integral_pairs(self, sol: PotentialSolution) -> list[tuple[float, float]]:
        lower = default_t_grid(sol, num=2)[0]
        s = max(2.0 * self.mass_scale, 2.0 * lower)
        return [(s, 10.0 * s)]

    def run_identities(self) -> None:
        sol = self.green()
        radii = default_identity_radii(sol, num=self.config.run.identity_points)
        samples = identity_suite(sol, radii, jobs=self.jobs)

        for tag in IdentityTag:
            tagged = [s for s in samples if s.tag == tag]
            worst = max(s.relerr for s in tagged)
            self.check(
                f"identities.{tag}",
                worst < self.scaled(TOLERANCES[tag]),
                measured=worst,
                threshold=self.scaled(TOLERANCES[tag]),
                detail=f"{len(tagged)} radii",
            )

        pairs = self.config.run.integral_pairs or self.default_integral_pairs(sol)
        integrals = [check_integral(sol, s, t) for s, t in pairs]
        for check in integrals:
            self.check(
                f"identities.integral(s={check.s:g},t={check.t:g})",
                check.relerr < self.scaled(INTEGRAL_TOLERANCE),
                measured=check.relerr,
                threshold=self.scaled(INTEGRAL_TOLERANCE),
            )

        for p in self.config.run.p_list:
            cap = self.capacitary(p)
            worst = max(check_meancurv(cap, float(r)).relerr for r in cap.radii[1:-1:64])
            tolerance = TOLERANCES[IdentityTag.MEAN_CURV_HARMONIC]
            self.check(
                f"identities.p={p:g}.{IdentityTag.MEAN_CURV_HARMONIC}",
                worst < self.scaled(tolerance),
                measured=worst,
                threshold=self.scaled(tolerance),
            )

        self.writer.write_identities(samples, integrals, "identities")

    def run_fit(self) -> None:
        sol = self.green()
        threshold = self.scaled(MASS_RTOL) * self.mass_scale
        mass_fit, residual = fit_expansion(sol)
        self.result.results["green_fit"] = {"mass": mass_fit, "residual": residual}
        self.check(
            "fit.green",
            abs(mass_fit - self.mass) <= threshold,
            measured=mass_fit,
            threshold=threshold,
            detail=f"residual {residual:.3e}",
        )

        radii = np.geomspace(10.0, 1e3, 50) * self.model.length_scale
        values = I_profile(sol, radii)
        error = abs(values[-1] - 2.0 * self.mass)
        self.check(
            "fit.I_limit",
            error <= self.scaled(I_LIMIT_RTOL) * self.mass_scale,
            measured=values[-1],
            threshold=self.scaled(I_LIMIT_RTOL) * self.mass_scale,
            detail=f"2m = {2.0 * self.mass:g}",
        )
        columns = [radii.tolist(), values.tolist()]
        header = ["r", "I"]

        for p in self.config.run.p_list:
            cap = self.capacitary(p)
            mass_fit, residual = fit_expansion(cap)
            self.result.results[f"p={p:g}_fit"] = {"mass": mass_fit, "residual": residual}
            self.check(
                f"fit.p={p:g}",
                abs(mass_fit - self.mass) <= threshold,
                measured=mass_fit,
                threshold=threshold,
                detail=f"residual {residual:.3e}",
            )

            profile = Ip_profile(cap, radii)
            limit = Ip_limit(cap)
            tolerance = self.scaled(I_LIMIT_RTOL) * max(abs(limit), 1.0)
            self.check(
                f"fit.p={p:g}.Ip_limit",
                abs(profile[-1] - limit) <= tolerance,
                measured=profile[-1],
                threshold=tolerance,
                detail=f"2m c_p^(1-p) = {limit:.10g}",
            )
            columns.append(profile.tolist())
            header.append(f"Ip_{p:g}")

        self.writer.write_table(header, [list(row) for row in zip(*columns)], "I_profile")

    def conformal_field(self, resolution: int | None = None) -> ConformalField:
        solver = self.config.solver
        if solver.field_path is not None and resolution is None:
            path = Path(solver.field_path)
            return ConformalField.load_raw(path.parent, path.name)

        assert solver.box_length is not None
        return ConformalField.from_model(
            self.model,
            solver.box_length,
            resolution or solver.resolution,
            pole=solver.pole,
        )

    def grid_t_values(self) -> NDArray[np.float64]:
        grid_config = self.config.run.t_grid
        if grid_config.values is not None:
            return np.asarray(grid_config.values, dtype=np.float64)
        assert grid_config.t_min is not None and grid_config.t_max is not None
        return np.geomspace(grid_config.t_min, grid_config.t_max, grid_config.num)

    def radial_reference(self, conformal_field: ConformalField) -> PotentialSolution:
        model = conformal_field.radial_model()
        return solve_green(model, exterior=not model.is_complete)

    def grid_error(
        self, conformal_field: ConformalField, ts: NDArray[np.float64]
    ) -> float:
        sol = solve_green_3d(conformal_field, rtol=self.config.solver.cg_rtol)
        radial = self.radial_reference(conformal_field)
        return max(abs(eval_F(sol, t).F_value - eval_F(radial, t).F_value) for t in ts)

    def run_grid3d(self) -> None:
        run = self.config.run
        conformal_field = self.conformal_field()
        sol = solve_green_3d(conformal_field, rtol=self.config.solver.cg_rtol)
        ts = self.grid_t_values()
        report = sweep(sol, ts, tol=self.scaled(self.config.solver.tolerance), jobs=self.jobs)

        self.writer.write_field(conformal_field, "phi")
        self.writer.write_sweep(report, "grid")
        if report.samples:
            middle = report.samples[len(report.samples) // 2]
            self.writer.write_surface(extract_level_surface(sol, middle.level), "surface")

        self.result.results["grid"] = report.summary() | {
            "resolution": conformal_field.resolution,
            "side_length": conformal_field.side_length,
            "cg_iterations": sol.iterations,
        }

        self.check(
            "grid.all_levels_regular",
            not report.skipped,
            measured=len(report.skipped),
            threshold=0,
            required=False,
        )
        if not report.samples:
            self.check("grid.samples", False, measured=0, detail="every level was skipped")
            return

        defect = max(abs(s.flux / FOUR_PI - 1.0) for s in report.samples)
        self.check(
            "grid.flux_identity",
            defect <= self.scaled(GRID_FLUX_RTOL),
            measured=defect,
            threshold=self.scaled(GRID_FLUX_RTOL),
        )
        self.check(
            "grid.monotone",
            report.is_monotone,
            measured=len(report.violations),
            threshold=0,
            detail="tolerance widened by t |flux - 4 pi| per level",
        )

        if run.grid_F_bound is not None:
            worst = max(abs(s.F_value) for s in report.samples)
            self.check(
                "grid.F_bound",
                worst <= self.scaled(run.grid_F_bound),
                measured=worst,
                threshold=self.scaled(run.grid_F_bound),
            )

        if run.radial_rel_tol is not None:
            radial = self.radial_reference(conformal_field)
            for s in report.samples:
                reference = eval_F(radial, s.t).F_value
                error = _relative(s.F_value, reference)
                self.check(
                    f"grid.radial_oracle(t={s.t:g})",
                    error <= self.scaled(run.radial_rel_tol),
                    measured=error,
                    threshold=self.scaled(run.radial_rel_tol),
                    detail=f"radial F = {reference:.10g}",
                )

        if run.convergence_resolutions:
            coarse, fine = run.convergence_resolutions
            e_coarse = self.grid_error(self.conformal_field(coarse), ts)
            e_fine = self.grid_error(self.conformal_field(fine), ts)
            factor = e_coarse / max(e_fine, 1e-300)
            self.result.results["convergence"] = {
                "coarse": coarse,
                "fine": fine,
                "error_coarse": e_coarse,
                "error_fine": e_fine,
                "factor": factor,
            }
            self.check(
                "grid.convergence",
                factor >= run.convergence_factor,
                measured=factor,
                threshold=run.convergence_factor,
            )

    # ---------------------------------------------------------------------
    # Entry point
    # ---------------------------------------------------------------------

    def handlers(self) -> dict[RunMode, Callable[[], None]]:
        return {
            RunMode.SOLVE: self.run_solve,
            RunMode.GREEN_SWEEP: self.run_green_sweep,
            RunMode.P_SWEEP: self.run_p_sweep,
            RunMode.ADM: self.run_adm,
            RunMode.PENROSE: self.run_penrose,
            RunMode.IDENTITIES: self.run_identities,
            RunMode.FIT: self.run_fit,
            RunMode.GRID3D: self.run_grid3d,
        }

    def run(self, mode: RunMode | None = None) -> ExperimentResult:
        mode = RunMode(mode or self.config.run.mode)
        self._result = ExperimentResult(name=self.config.name, mode=mode)
        logger.info("Running %s (%s) on %s", self.config.name, mode, self.model.kind)

        self.audit_curvature()
        self.handlers()[mode]()
        self.check_oracles()

        summary = self.result.summary(self.model)
        self.writer.write_summary(summary)
        self.result.files = list(self.writer.files)
        return self.result


def run(
    config: ExperimentConfig,
    mode: RunMode | None = None,
    jobs: int = 1,
    tol_scale: float = 1.0,
    out_dir: str | Path | None = None,
) -> ExperimentResult:
    return Experiment(config, jobs=jobs, tol_scale=tol_scale, out_dir=out_dir).run(mode)


def run_config_file(
    path: str | Path,
    mode: RunMode | None = None,
    jobs: int = 1,
    tol_scale: float = 1.0,
    out_dir: str | Path | None = None,
) -> int:
    """Load, run and map the outcome to an exit status (0, 1, 2 or 3)."""
    try:
        config = load_config(path)
        experiment = Experiment(config, jobs=jobs, tol_scale=tol_scale, out_dir=out_dir)
    except ConfigError as exc:
        logger.error("%s", exc)
        return EXIT_CONFIG
    except ValueError as exc:
        logger.error("Invalid configuration in %s: %s", path, exc)
        return EXIT_CONFIG

    try:
        result = experiment.run(mode)
    except ConfigError as exc:
        logger.error("%s", exc)
        return EXIT_CONFIG
    except (SolverError, DomainError) as exc:
        logger.error("%s failed: %s", config.name, exc)
        return EXIT_SOLVER

    for failure in result.failures:
        logger.error(
            "Assertion failed: %s (measured %s, threshold %s) %s",
            failure.name,
            failure.measured,
            failure.threshold,
            failure.detail,
        )
    logger.info(
        "%s: %d/%d assertions passed, %d files written",
        config.name,
        len(result.assertions) - len(result.failures),
        len(result.assertions),
        len(result.files),
    )
    return result.exit_code
