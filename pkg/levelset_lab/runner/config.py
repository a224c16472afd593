"""
Experiment configuration.

An experiment is one YAML document with the blocks `metric`, `solver`, `run`
and `output`. Parsing yields a validated ExperimentConfig; every problem is
reported as a ConfigError naming the dotted field and, when the key is in
the document, its line.
"""

import os
from dataclasses import dataclass, field, fields
from enum import StrEnum
from pathlib import Path
from typing import Any, NoReturn

import numpy as np
import yaml
from dotenv import find_dotenv, load_dotenv

from ..exceptions import ConfigError
from ..metrics import MetricKind, MetricModel

_ = load_dotenv(find_dotenv(usecwd=True))

DEFAULT_OUT_DIR = "results"


class RunMode(StrEnum):
    SOLVE = "solve"
    GREEN_SWEEP = "green-sweep"
    P_SWEEP = "p-sweep"
    ADM = "adm"
    PENROSE = "penrose"
    IDENTITIES = "identities"
    FIT = "fit"
    GRID3D = "grid3d"


class OutputFormat(StrEnum):
    CSV = "csv"
    JSON = "json"
    OFF = "off"
    RAW = "raw"


class OracleQuantity(StrEnum):
    F = "F"
    CAP_P = "Cap_p"
    C_P = "c_p"
    BETA_P = "beta_p"


def env_default(name: str, fallback: str) -> str:
    return os.getenv(name, fallback) or fallback


# -------------------------------------------------------------------------
# Blocks
# -------------------------------------------------------------------------


@dataclass(frozen=True)
class MetricConfig:
    kind: MetricKind
    mass: float = 0.0
    smoothing_a: float = 0.0
    inner_radius: float | None = None
    profile_path: str | None = None

    def to_model(self) -> MetricModel:
        if self.kind == MetricKind.CUSTOM_RADIAL_CONFORMAL:
            assert self.profile_path is not None
            return MetricModel.from_profile_table(
                self.profile_path, inner_radius=self.inner_radius
            )

        return MetricModel(
            kind=self.kind,
            mass_param=self.mass,
            smoothing_a=self.smoothing_a,
            inner_radius=self.inner_radius,
        )


@dataclass(frozen=True)
class SolverConfig:
    num_nodes: int = 4096
    r_max: float | None = None
    exterior: bool | None = None
    tolerance: float = 1e-10
    cg_rtol: float = 1e-9
    box_length: float | None = None
    resolution: int | None = None
    pole: tuple[float, float, float] = (0.0, 0.0, 0.0)
    field_path: str | None = None


@dataclass(frozen=True)
class TGridConfig:
    num: int = 200
    t_min: float | None = None
    t_max: float | None = None
    values: list[float] | None = None


@dataclass(frozen=True)
class OracleConfig:
    quantity: OracleQuantity
    value: float
    tol: float
    p: float | None = None
    t: float | None = None
    times_pi: bool = False

    @property
    def expected(self) -> float:
        return self.value * np.pi if self.times_pi else self.value


@dataclass(frozen=True)
class RunConfig:
    mode: RunMode
    p_list: list[float] = field(default_factory=list)
    t_grid: TGridConfig = field(default_factory=TGridConfig)
    derivative_check: bool = True
    check_limit: bool = True
    oracles: list[OracleConfig] = field(default_factory=list)
    integral_pairs: list[tuple[float, float]] = field(default_factory=list)
    identity_points: int = 100
    grid_F_bound: float | None = None
    radial_rel_tol: float | None = None
    convergence_resolutions: list[int] = field(default_factory=list)
    convergence_factor: float = 2.5


@dataclass(frozen=True)
class OutputConfig:
    directory: str = DEFAULT_OUT_DIR
    formats: list[OutputFormat] = field(
        default_factory=lambda: [OutputFormat.CSV, OutputFormat.JSON]
    )
    name: str | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    metric: MetricConfig
    run: RunConfig
    solver: SolverConfig = field(default_factory=SolverConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    source: str | None = None

    @property
    def name(self) -> str:
        if self.output.name:
            return self.output.name
        if self.source:
            return Path(self.source).stem
        return str(self.run.mode)


# -------------------------------------------------------------------------
# Parsing
# -------------------------------------------------------------------------


def _as_number(value: Any) -> float | None:
    """Numbers, plus strings such as "1e-10" that YAML 1.1 leaves unparsed."""
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            return None
    return None


def _key_lines(node: yaml.Node | None, prefix: str = "") -> dict[str, int]:
    """Dotted key path -> 1-based line, from the composed node tree."""
    lines: dict[str, int] = {}
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            path = f"{prefix}.{key_node.value}" if prefix else str(key_node.value)
            lines[path] = key_node.start_mark.line + 1
            lines.update(_key_lines(value_node, path))
    elif isinstance(node, yaml.SequenceNode):
        for i, item in enumerate(node.value):
            path = f"{prefix}[{i}]"
            lines[path] = item.start_mark.line + 1
            lines.update(_key_lines(item, path))
    return lines


class _Reader:
    """Typed access to one mapping of the document with line-addressed errors."""

    def __init__(self, data: Any, path: str, lines: dict[str, int]) -> None:
        self.path = path
        self.lines = lines
        if data is None:
            data = {}
        if not isinstance(data, dict):
            self.fail(path, f"Invalid {path or 'document'}: must be a mapping")
        self.data: dict[str, Any] = data

    def child(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def fail(self, path: str, message: str) -> NoReturn:
        raise ConfigError(message, field=path, line=self.lines.get(path))

    def check_keys(self, allowed: set[str]) -> None:
        for key in self.data:
            if key not in allowed:
                self.fail(
                    self.child(key),
                    f"Unknown key: {key!r}. Must be one of {sorted(allowed)}",
                )

    def number(
        self,
        key: str,
        default: float | None = None,
        positive: bool = False,
        nonnegative: bool = False,
    ) -> float | None:
        if key not in self.data or self.data[key] is None:
            return default

        value = _as_number(self.data[key])
        path = self.child(key)
        if value is None:
            self.fail(path, f"Invalid {key}: {self.data[key]!r}. Must be a number")
        if positive and value <= 0:
            self.fail(path, f"Invalid {key}: {value}. Must be positive")
        if nonnegative and value < 0:
            self.fail(path, f"Invalid {key}: {value}. Must be non-negative")
        return float(value)

    def integer(self, key: str, default: int | None = None, minimum: int = 1) -> int | None:
        if key not in self.data or self.data[key] is None:
            return default

        value = self.data[key]
        path = self.child(key)
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(path, f"Invalid {key}: {value!r}. Must be an integer")
        if value < minimum:
            self.fail(path, f"Invalid {key}: {value}. Must be >= {minimum}")
        return int(value)

    def boolean(self, key: str, default: bool | None = None) -> bool | None:
        if key not in self.data or self.data[key] is None:
            return default

        value = self.data[key]
        if not isinstance(value, bool):
            self.fail(self.child(key), f"Invalid {key}: {value!r}. Must be true or false")
        return value

    def string(self, key: str, default: str | None = None) -> str | None:
        if key not in self.data or self.data[key] is None:
            return default

        value = self.data[key]
        if not isinstance(value, str):
            self.fail(self.child(key), f"Invalid {key}: {value!r}. Must be a string")
        return value

    def choice(self, key: str, enum: type[StrEnum], default: Any = None) -> Any:
        value = self.string(key)
        if value is None:
            if default is None:
                self.fail(self.child(key), f"Missing required key: {key!r}")
            return default
        try:
            return enum(value)
        except ValueError:
            self.fail(
                self.child(key),
                f"Invalid {key}: {value!r}. Must be one of {[e.value for e in enum]}",
            )

    def number_list(self, key: str) -> list[float] | None:
        if key not in self.data or self.data[key] is None:
            return None

        value = self.data[key]
        path = self.child(key)
        if not isinstance(value, list):
            self.fail(path, f"Invalid {key}: {value!r}. Must be a list of numbers")
        numbers = [_as_number(item) for item in value]
        for i, item in enumerate(numbers):
            if item is None:
                self.fail(
                    f"{path}[{i}]", f"Invalid {key} entry: {value[i]!r}. Must be a number"
                )
        return [float(v) for v in numbers if v is not None]

    def sub(self, key: str) -> "_Reader":
        return _Reader(self.data.get(key), self.child(key), self.lines)

    def items(self, key: str) -> list["_Reader"]:
        value = self.data.get(key)
        if value is None:
            return []
        path = self.child(key)
        if not isinstance(value, list):
            self.fail(path, f"Invalid {key}: must be a list")
        return [_Reader(item, f"{path}[{i}]", self.lines) for i, item in enumerate(value)]


def _parse_metric(reader: _Reader, base_dir: Path) -> MetricConfig:
    reader.check_keys({"kind", "mass", "smoothing_a", "inner_radius", "profile_path"})
    kind = reader.choice("kind", MetricKind)
    mass = reader.number("mass", 0.0)
    smoothing_a = reader.number("smoothing_a", 0.0, nonnegative=True)
    inner_radius = reader.number("inner_radius", positive=True)
    profile_path = reader.string("profile_path")

    if kind == MetricKind.CUSTOM_RADIAL_CONFORMAL:
        if profile_path is None:
            reader.fail(
                reader.child("kind"),
                f"Missing required key: 'profile_path' for kind {kind}",
            )
        resolved = Path(profile_path)
        if not resolved.is_absolute():
            resolved = base_dir / resolved
        if not resolved.is_file():
            reader.fail(
                reader.child("profile_path"), f"Profile table not found: {resolved}"
            )
        profile_path = str(resolved)

    if kind == MetricKind.FLAT and mass != 0.0:
        reader.fail(reader.child("mass"), f"Invalid mass: {mass}. Must be 0 for flat")

    if mass is not None and mass < 0 and kind != MetricKind.SMOOTHED_SCHWARZSCHILD:
        reader.fail(
            reader.child("mass"),
            f"Invalid mass: {mass}. Must be non-negative for {kind}",
        )

    if (
        kind == MetricKind.SMOOTHED_SCHWARZSCHILD
        and smoothing_a
        and mass is not None
        and 1.0 + mass / (2.0 * smoothing_a) <= 0
    ):
        reader.fail(
            reader.child("mass"),
            f"Invalid mass: {mass}. Must exceed -2*smoothing_a = {-2.0 * smoothing_a}",
        )

    return MetricConfig(
        kind=kind,
        mass=mass or 0.0,
        smoothing_a=smoothing_a or 0.0,
        inner_radius=inner_radius,
        profile_path=profile_path,
    )


def _parse_solver(reader: _Reader, base_dir: Path) -> SolverConfig:
    reader.check_keys({f.name for f in fields(SolverConfig)})
    defaults = SolverConfig()

    pole = reader.number_list("pole")
    if pole is not None and len(pole) != 3:
        reader.fail(reader.child("pole"), f"Invalid pole: {pole}. Must have 3 coordinates")

    field_path = reader.string("field_path")
    if field_path is not None:
        resolved = Path(field_path)
        if not resolved.is_absolute():
            resolved = base_dir / resolved
        if not resolved.with_suffix(".f8").is_file():
            reader.fail(
                reader.child("field_path"), f"Field block not found: {resolved}.f8"
            )
        field_path = str(resolved)

    return SolverConfig(
        num_nodes=reader.integer("num_nodes", defaults.num_nodes, minimum=8),
        r_max=reader.number("r_max", positive=True),
        exterior=reader.boolean("exterior"),
        tolerance=reader.number("tolerance", defaults.tolerance, nonnegative=True),
        cg_rtol=reader.number("cg_rtol", defaults.cg_rtol, positive=True),
        box_length=reader.number("box_length", positive=True),
        resolution=reader.integer("resolution", minimum=8),
        pole=tuple(pole) if pole is not None else defaults.pole,
        field_path=field_path,
    )


def _parse_t_grid(reader: _Reader) -> TGridConfig:
    reader.check_keys({"num", "t_min", "t_max", "values"})
    values = reader.number_list("values")
    if values is not None:
        if any(v <= 0 for v in values):
            reader.fail(reader.child("values"), "Invalid values: t must be positive")
        if any(b <= a for a, b in zip(values, values[1:])):
            reader.fail(
                reader.child("values"), "Invalid values: must be strictly increasing"
            )

    t_min = reader.number("t_min", positive=True)
    t_max = reader.number("t_max", positive=True)
    if t_min is not None and t_max is not None and t_max <= t_min:
        reader.fail(
            reader.child("t_max"), f"Invalid t_max: {t_max}. Must exceed t_min={t_min}"
        )

    return TGridConfig(
        num=reader.integer("num", 200, minimum=2),
        t_min=t_min,
        t_max=t_max,
        values=values,
    )


def _parse_oracle(reader: _Reader) -> OracleConfig:
    reader.check_keys({f.name for f in fields(OracleConfig)})
    quantity = reader.choice("quantity", OracleQuantity)
    value = reader.number("value")
    if value is None:
        reader.fail(reader.child("value"), "Missing required key: 'value'")

    t = reader.number("t", positive=True)
    if quantity == OracleQuantity.F and t is None:
        reader.fail(reader.child("t"), "Missing required key: 't' for an F oracle")

    p = reader.number("p")
    if p is not None and not 1.0 < p < 3.0:
        reader.fail(reader.child("p"), f"Invalid p: {p}. Must lie in (1, 3)")

    return OracleConfig(
        quantity=quantity,
        value=value,
        tol=reader.number("tol", 1e-8, positive=True),
        p=p,
        t=t,
        times_pi=reader.boolean("times_pi", False),
    )


def _parse_run(reader: _Reader) -> RunConfig:
    reader.check_keys({f.name for f in fields(RunConfig)})
    mode = reader.choice("mode", RunMode)

    p_list = reader.number_list("p_list") or []
    for i, p in enumerate(p_list):
        if not 1.0 < p < 3.0:
            reader.fail(f"{reader.child('p_list')}[{i}]", f"Invalid p: {p}. Must lie in (1, 3)")

    if mode in (RunMode.P_SWEEP, RunMode.PENROSE) and not p_list:
        reader.fail(reader.child("p_list"), f"Missing required key: 'p_list' for mode {mode}")

    pairs = []
    for i, item in enumerate(reader.data.get("integral_pairs") or []):
        path = f"{reader.child('integral_pairs')}[{i}]"
        values = [_as_number(v) for v in item] if isinstance(item, list) else []
        if (
            len(values) != 2
            or values[0] is None
            or values[1] is None
            or not 0 < values[0] < values[1]
        ):
            reader.fail(path, f"Invalid pair: {item!r}. Must be [s, t] with 0 < s < t")
        pairs.append((values[0], values[1]))

    resolutions = reader.data.get("convergence_resolutions") or []
    path = reader.child("convergence_resolutions")
    if not isinstance(resolutions, list) or not all(
        isinstance(n, int) and not isinstance(n, bool) and n >= 8 for n in resolutions
    ):
        reader.fail(path, f"Invalid convergence_resolutions: {resolutions!r}. Must be integers >= 8")
    if resolutions and len(resolutions) != 2:
        reader.fail(path, "Invalid convergence_resolutions: give a coarse and a fine N")

    defaults = RunConfig(mode=mode)
    return RunConfig(
        mode=mode,
        p_list=p_list,
        t_grid=_parse_t_grid(reader.sub("t_grid")),
        derivative_check=reader.boolean("derivative_check", defaults.derivative_check),
        check_limit=reader.boolean("check_limit", defaults.check_limit),
        oracles=[_parse_oracle(item) for item in reader.items("oracles")],
        integral_pairs=pairs,
        identity_points=reader.integer("identity_points", defaults.identity_points, minimum=2),
        grid_F_bound=reader.number("grid_F_bound", positive=True),
        radial_rel_tol=reader.number("radial_rel_tol", positive=True),
        convergence_resolutions=list(resolutions),
        convergence_factor=reader.number(
            "convergence_factor", defaults.convergence_factor, positive=True
        ),
    )


def _parse_output(reader: _Reader) -> OutputConfig:
    reader.check_keys({"directory", "formats", "name"})
    formats = reader.data.get("formats")
    parsed = OutputConfig().formats
    if formats is not None:
        if not isinstance(formats, list):
            reader.fail(reader.child("formats"), "Invalid formats: must be a list")
        parsed = []
        for i, value in enumerate(formats):
            # YAML 1.1 reads a bare `off` as false
            if value is False:
                value = OutputFormat.OFF.value
            try:
                parsed.append(OutputFormat(value))
            except ValueError:
                reader.fail(
                    f"{reader.child('formats')}[{i}]",
                    f"Invalid format: {value!r}. Must be one of {[f.value for f in OutputFormat]}",
                )

    return OutputConfig(
        directory=reader.string(
            "directory", env_default("LEVELSET_LAB_OUT_DIR", DEFAULT_OUT_DIR)
        ),
        formats=parsed,
        name=reader.string("name"),
    )


def parse_config(text: str, source: str | Path | None = None) -> ExperimentConfig:
    try:
        node = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        line = exc.problem_mark.line + 1 if exc.problem_mark else None
        raise ConfigError(f"YAML syntax error: {exc.problem}", line=line) from exc

    lines = _key_lines(node)
    root = _Reader(data, "", lines)
    root.check_keys({"metric", "solver", "run", "output"})

    for required in ("metric", "run"):
        if required not in root.data:
            raise ConfigError(f"Missing required block: {required!r}", field=required)

    base_dir = Path(source).parent if source is not None else Path.cwd()
    config = ExperimentConfig(
        metric=_parse_metric(root.sub("metric"), base_dir),
        solver=_parse_solver(root.sub("solver"), base_dir),
        run=_parse_run(root.sub("run")),
        output=_parse_output(root.sub("output")),
        source=str(source) if source is not None else None,
    )

    if config.run.mode in (RunMode.PENROSE, RunMode.P_SWEEP) and config.metric.inner_radius is None:
        raise ConfigError(
            f"Missing required key: 'inner_radius' for mode {config.run.mode}",
            field="metric.inner_radius",
            line=lines.get("metric"),
        )

    if config.run.mode == RunMode.GRID3D and config.solver.field_path is None:
        for key in ("box_length", "resolution"):
            if getattr(config.solver, key) is None:
                raise ConfigError(
                    f"Missing required key: {key!r} for mode {RunMode.GRID3D}",
                    field=f"solver.{key}",
                    line=lines.get("solver"),
                )

    if config.run.mode == RunMode.GRID3D:
        t_grid = config.run.t_grid
        if t_grid.values is None and (t_grid.t_min is None or t_grid.t_max is None):
            raise ConfigError(
                f"Missing required key: 't_grid.values' or 't_grid.t_min'/'t_grid.t_max' "
                f"for mode {RunMode.GRID3D}",
                field="run.t_grid",
                line=lines.get("run"),
            )

    return config


def load_config(path: str | Path) -> ExperimentConfig:
    if not isinstance(path, Path):
        path = Path(path)

    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")

    with open(path, "r", encoding="utf-8") as f:
        text = f.read()

    return parse_config(text, source=path)
