"""Sparse linear program container used by the model builder and the solvers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
from scipy import sparse

LE, EQ, GE = "<=", "=", ">="
SENSES = (LE, EQ, GE)


class LPError(Exception):
    """Base error for the LP layer. ``code`` is a stable machine-readable tag."""

    code = "LP_ERROR"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class DuplicateNameError(LPError):
    code = "DUPLICATE_NAME"


@dataclass
class Variable:
    name: str
    lower: float = 0.0
    upper: float = math.inf
    obj: float = 0.0


@dataclass
class Constraint:
    name: str
    sense: str
    coeffs: dict[int, float] = field(default_factory=dict)
    rhs: float = 0.0


class LinearProgram:
    """Minimisation LP with named variables and rows kept in insertion order.

    Zero coefficients are never stored; repeated terms for the same variable
    in one row are summed.
    """

    def __init__(self, name: str = "model"):
        self.name = name
        self.variables: list[Variable] = []
        self.constraints: list[Constraint] = []
        self.obj_constant = 0.0
        self._var_index: dict[str, int] = {}
        self._con_index: dict[str, int] = {}

    @property
    def num_variables(self) -> int:
        return len(self.variables)

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    def add_variable(self, name: str, lower: float = 0.0, upper: float = math.inf,
                     obj: float = 0.0) -> int:
        if name in self._var_index:
            raise DuplicateNameError(f"variable {name!r} already defined")
        if lower > upper:
            raise LPError(f"variable {name!r}: lower bound {lower} exceeds upper {upper}")
        handle = len(self.variables)
        self.variables.append(Variable(name, float(lower), float(upper), float(obj)))
        self._var_index[name] = handle
        return handle

    def add_constraint(self, name: str, coeffs: Mapping[int, float] | Iterable[tuple[int, float]],
                       sense: str, rhs: float) -> int:
        if sense not in SENSES:
            raise LPError(f"constraint {name!r}: unknown sense {sense!r}")
        if name in self._con_index:
            raise DuplicateNameError(f"constraint {name!r} already defined")
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        row: dict[int, float] = {}
        nvar = len(self.variables)
        for j, a in items:
            if not 0 <= j < nvar:
                raise LPError(f"constraint {name!r}: unknown variable handle {j}")
            row[j] = row.get(j, 0.0) + float(a)
        row = {j: a for j, a in row.items() if a != 0.0}
        handle = len(self.constraints)
        self.constraints.append(Constraint(name, sense, row, float(rhs)))
        self._con_index[name] = handle
        return handle

    def add_objective(self, var: int, coeff: float) -> None:
        """Accumulate ``coeff`` onto the objective coefficient of ``var``."""
        self.variables[var].obj += float(coeff)

    def variable_index(self, name: str) -> int:
        return self._var_index[name]

    def constraint_index(self, name: str) -> int:
        return self._con_index[name]

    def has_variable(self, name: str) -> bool:
        return name in self._var_index

    def matrices(self):
        """Return ``(c, A, senses, b, lower, upper)`` with ``A`` in CSR form."""
        n, m = len(self.variables), len(self.constraints)
        c = np.array([v.obj for v in self.variables], dtype=float)
        lower = np.array([v.lower for v in self.variables], dtype=float)
        upper = np.array([v.upper for v in self.variables], dtype=float)
        indptr = np.zeros(m + 1, dtype=np.int64)
        cols: list[int] = []
        vals: list[float] = []
        for k, con in enumerate(self.constraints):
            cols.extend(con.coeffs.keys())
            vals.extend(con.coeffs.values())
            indptr[k + 1] = len(cols)
        A = sparse.csr_matrix((np.asarray(vals, dtype=float), np.asarray(cols, dtype=np.int64), indptr),
                              shape=(m, n))
        senses = [con.sense for con in self.constraints]
        b = np.array([con.rhs for con in self.constraints], dtype=float)
        return c, A, senses, b, lower, upper

    def row_activity(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.array([sum(a * x[j] for j, a in con.coeffs.items()) for con in self.constraints])

    def objective_value(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(sum(v.obj * x[j] for j, v in enumerate(self.variables)) + self.obj_constant)

    def max_violation(self, x) -> float:
        """Largest absolute violation of any row or bound at point ``x``."""
        x = np.asarray(x, dtype=float)
        worst = 0.0
        for con, act in zip(self.constraints, self.row_activity(x)):
            if con.sense == LE:
                worst = max(worst, act - con.rhs)
            elif con.sense == GE:
                worst = max(worst, con.rhs - act)
            else:
                worst = max(worst, abs(act - con.rhs))
        for j, v in enumerate(self.variables):
            worst = max(worst, v.lower - x[j], x[j] - v.upper)
        return float(worst)

    def structurally_equal(self, other: "LinearProgram") -> bool:
        if self.obj_constant != other.obj_constant:
            return False
        if [(v.name, v.lower, v.upper, v.obj) for v in self.variables] != \
                [(v.name, v.lower, v.upper, v.obj) for v in other.variables]:
            return False
        # Row coefficient order is not semantic; MPS stores the matrix column-major.
        return [(c.name, c.sense, c.coeffs, c.rhs) for c in self.constraints] == \
            [(c.name, c.sense, c.coeffs, c.rhs) for c in other.constraints]
