"""Escape hatch for third-party solvers: MPS out, ``name value`` solution file in.

The solution file is plain text with one ``name value`` pair per line.
Optional header lines ``# status <Optimal|Infeasible|Unbounded>`` and
``# objective <value>`` carry the solve status; lines starting with ``#``
are otherwise ignored.
"""

from __future__ import annotations

import math
import shlex
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

from .mps import write_mps, read_mps
from .program import LinearProgram, LPError
from .simplex import NumericalFailure, Solution, Status


def write_solution_file(path, names, values, status: Status = Status.OPTIMAL,
                        objective: float | None = None) -> None:
    lines = [f"# status {status.value}"]
    if objective is not None:
        lines.append(f"# objective {format(objective, '.17g')}")
    lines += [f"{name} {format(float(v), '.17g')}" for name, v in zip(names, values)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_solution_file(path) -> tuple[Status, dict[str, float]]:
    status = Status.OPTIMAL
    values: dict[str, float] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="ascii").splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            toks = line[1:].split()
            if len(toks) == 2 and toks[0] == "status":
                try:
                    status = Status(toks[1])
                except ValueError:
                    raise LPError(f"{path}:{lineno}: unknown status {toks[1]!r}", "PARSE_ERROR") from None
            continue
        toks = line.split()
        if len(toks) != 2:
            raise LPError(f"{path}:{lineno}: expected 'name value'", "PARSE_ERROR")
        try:
            values[toks[0]] = float(toks[1])
        except ValueError:
            raise LPError(f"{path}:{lineno}: bad value {toks[1]!r}", "PARSE_ERROR") from None
    return status, values


def solution_from_values(lp: LinearProgram, status: Status, values: dict[str, float]) -> Solution:
    n, m = lp.num_variables, lp.num_constraints
    names = tuple(v.name for v in lp.variables)
    if status != Status.OPTIMAL:
        obj = -math.inf if status == Status.UNBOUNDED else math.nan
        return Solution(status, np.full(n, np.nan), np.full(m, np.nan), obj, 0, names)
    x = np.array([values.get(name, 0.0) for name in names])
    return Solution(status, x, np.full(m, np.nan), lp.objective_value(x), 0, names)


def default_command() -> list[str]:
    """Bundled bridge to scipy's HiGHS, used when no command is configured."""
    return [sys.executable, "-m", "hydraplan.lp.highs_bridge"]


def solve_external(lp: LinearProgram, command: str | list[str] | None = None,
                   workdir=None, keep_files: bool = False) -> Solution:
    """Write ``lp`` as MPS, run ``command <mps> <solution>``, read the solution back.

    Duals are not transported through the solution file and come back as NaN.
    """
    if command is None:
        argv = default_command()
    elif isinstance(command, str):
        argv = shlex.split(command)
    else:
        argv = list(command)
    with tempfile.TemporaryDirectory(dir=workdir) as tmp:
        mps_path = Path(tmp) / "model.mps"
        sol_path = Path(tmp) / "model.sol"
        write_mps(lp, mps_path)
        proc = subprocess.run(argv + [str(mps_path), str(sol_path)], capture_output=True, text=True)
        if proc.returncode != 0 or not sol_path.exists():
            raise NumericalFailure(f"external solver failed ({proc.returncode}): {proc.stderr.strip()}")
        status, values = read_solution_file(sol_path)
    return solution_from_values(lp, status, values)


def solve_mps_with_scipy(mps_path, sol_path) -> None:
    lp = read_mps(mps_path)
    sol = solve_with_scipy(lp)
    write_solution_file(sol_path, sol.variable_names, sol.x, sol.status,
                        sol.objective if sol.status == Status.OPTIMAL else None)


def solve_with_scipy(lp: LinearProgram) -> Solution:
    from scipy.optimize import linprog
    from scipy import sparse

    c, A, senses, b, lower, upper = lp.matrices()
    names = tuple(v.name for v in lp.variables)
    sign = np.array([1.0 if s == "<=" else -1.0 for s in senses])
    ub_rows = np.array([s != "=" for s in senses], dtype=bool)
    A_ub = sparse.diags(sign[ub_rows]) @ A[ub_rows] if ub_rows.any() else None
    b_ub = (sign * b)[ub_rows] if ub_rows.any() else None
    A_eq = A[~ub_rows] if (~ub_rows).any() else None
    b_eq = b[~ub_rows] if (~ub_rows).any() else None
    bounds = [(None if not math.isfinite(lo) else lo, None if not math.isfinite(up) else up)
              for lo, up in zip(lower, upper)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    n, m = len(c), len(senses)
    if res.status == 0:
        duals = np.zeros(m)
        if A_ub is not None:
            duals[ub_rows] = res.ineqlin.marginals * sign[ub_rows]
        if A_eq is not None:
            duals[~ub_rows] = res.eqlin.marginals
        return Solution(Status.OPTIMAL, res.x, duals, float(res.fun + lp.obj_constant), int(res.nit), names)
    if res.status == 2:
        return Solution(Status.INFEASIBLE, np.full(n, np.nan), np.full(m, np.nan), math.nan, int(res.nit), names)
    if res.status == 3:
        return Solution(Status.UNBOUNDED, np.full(n, np.nan), np.full(m, np.nan), -math.inf, int(res.nit), names)
    raise NumericalFailure(f"HiGHS returned status {res.status}: {res.message}")
