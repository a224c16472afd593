"""Numerical laboratory for monotone quantities along level sets of potentials."""

from .exceptions import (
    ConfigError,
    ConvergenceError,
    DegenerateLevelError,
    DomainError,
    FitInstabilityError,
    QuadratureError,
    SolverError,
)
from .logging_config import get_logger, setup_logging

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DegenerateLevelError",
    "DomainError",
    "FitInstabilityError",
    "QuadratureError",
    "SolverError",
    "get_logger",
    "setup_logging",
]
