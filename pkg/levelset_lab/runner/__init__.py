from .config import (
    ExperimentConfig,
    MetricConfig,
    OracleConfig,
    OracleQuantity,
    OutputConfig,
    OutputFormat,
    RunConfig,
    RunMode,
    SolverConfig,
    TGridConfig,
    load_config,
    parse_config,
)
from .experiments import (
    EXIT_ASSERTION,
    EXIT_CONFIG,
    EXIT_PASS,
    EXIT_SOLVER,
    AssertionRecord,
    Experiment,
    ExperimentResult,
    run,
    run_config_file,
)
from .writer import ReportWriter

__all__ = [
    "EXIT_ASSERTION",
    "EXIT_CONFIG",
    "EXIT_PASS",
    "EXIT_SOLVER",
    "AssertionRecord",
    "Experiment",
    "ExperimentConfig",
    "ExperimentResult",
    "MetricConfig",
    "OracleConfig",
    "OracleQuantity",
    "OutputConfig",
    "OutputFormat",
    "ReportWriter",
    "RunConfig",
    "RunMode",
    "SolverConfig",
    "TGridConfig",
    "load_config",
    "parse_config",
    "run",
    "run_config_file",
]
