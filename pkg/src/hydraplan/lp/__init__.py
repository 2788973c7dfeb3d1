"""Linear-program container, embedded simplex solver and MPS/solution-file I/O."""

from .program import EQ, GE, LE, DuplicateNameError, LinearProgram, LPError
from .simplex import NumericalFailure, Solution, Status, solve

__all__ = [
    "EQ", "GE", "LE", "DuplicateNameError", "LinearProgram", "LPError",
    "NumericalFailure", "Solution", "Status", "solve",
]
