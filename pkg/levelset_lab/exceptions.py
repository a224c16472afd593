class DomainError(ValueError):
    """Raised when an argument lies outside the domain of a metric, solution or functional."""


class ConfigError(ValueError):
    """
    Raised for malformed or invalid experiment configurations.

    `field` is the dotted path of the offending key (e.g. "metric.mass") and
    `line` the 1-based line of that key in the source document, when known.
    """

    def __init__(
        self, message: str, field: str | None = None, line: int | None = None
    ) -> None:
        self.field = field
        self.line = line

        location = ""
        if field:
            location = f"[{field}] "
        if line is not None:
            location = f"line {line}: {location}"

        super().__init__(f"{location}{message}")


class SolverError(RuntimeError):
    """Base class for numerical failures inside a solve."""


class QuadratureError(SolverError):
    """A quadrature (or its analytic tail) missed the requested relative accuracy."""


class ConvergenceError(SolverError):
    """An iterative linear solve did not converge within its iteration cap."""


class DegenerateLevelError(SolverError):
    """A level set touches the box boundary or is too close to a critical level."""


class FitInstabilityError(SolverError):
    """An asymptotic fit did not show the expected decay of its residual."""
