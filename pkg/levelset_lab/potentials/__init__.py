from .grid import RadialGrid
from .quadrature import (
    QuadratureTail,
    SchwarzschildGreenTail,
    TailIntegral,
    analytic_tail,
    tail_exponents,
)
from .solution import (
    SOLUTION_TABLE_HEADER,
    PotentialSolution,
    ProblemKind,
    richardson_derivative,
)
from .solver import capacity, cp_beta, solve_capacitary, solve_green

__all__ = [
    "PotentialSolution",
    "ProblemKind",
    "QuadratureTail",
    "RadialGrid",
    "SOLUTION_TABLE_HEADER",
    "SchwarzschildGreenTail",
    "TailIntegral",
    "analytic_tail",
    "capacity",
    "cp_beta",
    "richardson_derivative",
    "solve_capacitary",
    "solve_green",
    "tail_exponents",
]
