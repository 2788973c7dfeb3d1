"""Small hand-built instances for row-level and solver tests."""

from __future__ import annotations

import itertools
import math

import numpy as np

from hydraplan.dimensions import ModelDimensions, Technology, make_seasons
from hydraplan.lp import LinearProgram
from hydraplan.parameters import ParameterStore

SOLAR = Technology("solar", "production", "Power", vres=True)
GAS = Technology("gas", "production", "Power")
ELEC = Technology("elec", "production", "H2", electrolyzer=True)
BATTERY = Technology("battery", "storage", "Power")
LINE = Technology("line", "transmission", "Power")
H2PIPE = Technology("h2pipe", "transmission", "H2")
NGPIPE = Technology("ngpipe", "transmission", "NG")
WELL = Technology("well", "production", "NG")


def dims(nodes=("A",), techs=(GAS,), node_techs=None, hours=2, periods=1, L=1, scenarios=("S1",),
         probabilities=None, represents=None, arcs=(), exempt=(), commodities=("Power",)) -> ModelDimensions:
    if node_techs is None:
        node_techs = tuple((n, t.name) for n in nodes for t in techs if t.kind != "transmission")
    seasons = make_seasons([("s", hours, hours if represents is None else represents)])
    if probabilities is None:
        probabilities = tuple(1.0 / len(scenarios) for _ in scenarios)
    return ModelDimensions(
        nodes=tuple(nodes), periods=tuple(range(1, periods + 1)), period_length=L, seasons=seasons,
        scenarios=tuple(scenarios), probabilities=tuple(probabilities), commodities=tuple(commodities),
        technologies=tuple(techs), node_technologies=tuple(node_techs), arcs=tuple(arcs), exempt=tuple(exempt),
    )


def params(d: ModelDimensions, **over) -> ParameterStore:
    """Zero-cost, unconstrained defaults; lifetimes cover the whole horizon."""
    base = dict(
        discount_rate=0.0,
        lifetime={t.name: 99 for t in d.technologies},
        invest_cost={}, op_cost={}, shed_cost={}, initial_capacity={}, initial_transmission={},
        emission_intensity={}, emission_cap={}, resource_limit={}, electrolyzer_power={}, fuel_use={},
        max_build={}, fixed_h2={},
    )
    base.update(over)
    return ParameterStore(**base)


def row(model, name):
    """``{variable name: coefficient}``, sense and rhs of the row called ``name``."""
    lp = model.lp
    for con in lp.constraints:
        if con.name == name:
            return ({lp.variables[v].name: c for v, c in con.coeffs.items()}, con.sense, con.rhs)
    raise KeyError(name)


def rows_named(model, prefix):
    return [c.name for c in model.lp.constraints if c.name.split("[", 1)[0] == prefix]


def objective(model) -> dict:
    lp = model.lp
    return {v.name: v.obj for v in lp.variables if v.obj}


# -- random LPs and the exhaustive-basis oracle -------------------------------

def random_lp(rng: np.random.Generator, max_size: int = 8, name: str = "rand") -> LinearProgram:
    """A small LP with mixed senses, some free and boxed variables and integer-ish data."""
    n = int(rng.integers(1, max_size + 1))
    m = int(rng.integers(1, max_size + 1))
    lp = LinearProgram(name)
    for j in range(n):
        kind = rng.random()
        lo, up = 0.0, math.inf
        if kind < 0.15:
            lo = -math.inf
        elif kind < 0.35:
            up = float(rng.integers(1, 10))
        elif kind < 0.45:
            lo, up = float(rng.integers(-5, 0)), float(rng.integers(0, 6))
        lp.add_variable(f"x{j}", lo, up, float(rng.integers(-10, 11)))
    # most instances get right-hand sides that keep an integer point feasible
    anchor = None
    if rng.random() < 0.75:
        anchor = [float(rng.integers(max(v.lower, -3), min(v.upper, 4) + 1))
                  for v in lp.variables]
    for i in range(m):
        coeffs = {j: float(rng.integers(-6, 7)) for j in range(n) if rng.random() < 0.7}
        coeffs = {j: c for j, c in coeffs.items() if c}
        sense = ("<=", ">=", "=")[int(rng.choice(3, p=[0.5, 0.3, 0.2]))]
        if anchor is None:
            rhs = float(rng.integers(-10, 21))
        else:
            act = sum(c * anchor[j] for j, c in coeffs.items())
            slack = float(rng.integers(0, 6))
            rhs = act + slack if sense == "<=" else act - slack if sense == ">=" else act
        lp.add_constraint(f"r{i}", coeffs, sense, rhs)
    return lp


def _independent_rows(M: np.ndarray) -> list[int]:
    keep: list[int] = []
    for i in range(M.shape[0]):
        if np.linalg.matrix_rank(M[keep + [i]]) > len(keep):
            keep.append(i)
    return keep


def _vertices(M, b, lo, up, tol=1e-9):
    """Every basic feasible point of ``{z : M z = b, lo <= z <= up}`` (all ``lo`` finite)."""
    rows = _independent_rows(M)
    Mr, br = M[rows], b[rows]
    r, N = Mr.shape
    for basis in itertools.combinations(range(N), r):
        B = Mr[:, basis]
        if abs(np.linalg.det(B)) < 1e-9:
            continue
        nonbasic = [j for j in range(N) if j not in basis]
        choices = [[lo[j]] + ([up[j]] if math.isfinite(up[j]) and up[j] != lo[j] else []) for j in nonbasic]
        for vals in itertools.product(*choices):
            z = np.zeros(N)
            z[nonbasic] = vals
            z[list(basis)] = np.linalg.solve(B, br - Mr[:, nonbasic] @ z[nonbasic])
            if (np.all(z >= lo - tol) and np.all(z <= up + tol)
                    and np.allclose(M @ z, b, atol=1e-7)):
                yield z


def enumerate_lp(lp: LinearProgram):
    """Status and optimal objective by enumerating every vertex of the standard form.

    Each row gets a slack, a free variable is split into two nonnegative
    parts and a variable with only an upper bound is negated, so every column
    has a finite lower bound and the optimum (if any) sits at a vertex.  The
    LP is unbounded when the recession cone ``{d >= 0, M d = 0}`` restricted
    to columns without an upper bound holds a direction of negative cost;
    that is checked on the cone's normalised slice ``sum d = 1``.
    """
    c, A, senses, b, lo, up = lp.matrices()
    A = A.toarray()
    m, n = A.shape
    cols, cost, clo, cup = [], [], [], []
    for j in range(n):
        if math.isinf(lo[j]) and math.isinf(up[j]):
            for s in (1.0, -1.0):
                cols.append(s * A[:, j]); cost.append(s * c[j]); clo.append(0.0); cup.append(math.inf)
        elif math.isinf(lo[j]):
            cols.append(-A[:, j]); cost.append(-c[j]); clo.append(-up[j]); cup.append(math.inf)
        else:
            cols.append(A[:, j]); cost.append(c[j]); clo.append(lo[j]); cup.append(up[j])
    for i, s in enumerate(senses):
        e = np.zeros(m)
        e[i] = 1.0 if s != ">=" else -1.0
        cols.append(e); cost.append(0.0); clo.append(0.0); cup.append(0.0 if s == "=" else math.inf)
    M = np.array(cols).T
    cost, clo, cup = np.array(cost), np.array(clo), np.array(cup)

    objs = [float(cost @ z) for z in _vertices(M, b, clo, cup)]
    if not objs:
        return "Infeasible", None
    ray = [j for j in range(M.shape[1]) if math.isinf(cup[j])]
    if ray:
        Mh = np.vstack([M[:, ray], np.ones(len(ray))])
        bh = np.concatenate([np.zeros(m), [1.0]])
        zero, inf = np.zeros(len(ray)), np.full(len(ray), math.inf)
        if any(float(cost[ray] @ d) < -1e-9 for d in _vertices(Mh, bh, zero, inf)):
            return "Unbounded", None
    return "Optimal", min(objs) + lp.obj_constant


def dual_objective(lp, y):
    """Lagrangian dual bound from row duals ``y``: b.y plus the bound terms of c - A^T y."""
    c, A, senses, b, lo, up = lp.matrices()
    d = c - A.T @ y
    total = [float(b @ y)]
    for j, dj in enumerate(d):
        if dj > 1e-9:
            total.append(lo[j] * dj)
        elif dj < -1e-9:
            total.append(up[j] * dj)
    return math.fsum(total) + lp.obj_constant



# -- golden MPS instances ------------------------------------------------------

def one_var_lp():
    lp = LinearProgram("one")
    x = lp.add_variable("x", obj=1.0)
    lp.add_constraint("c1", {x: 1.0}, ">=", 1.0)
    return lp


def mixed_lp():
    lp = LinearProgram("mixed")
    gen = lp.add_variable("gen", 0.0, 0.1, 2.5)
    shed = lp.add_variable("shed", obj=22000.0)
    flow = lp.add_variable("flow", -math.inf, 5.0)
    lp.add_variable("idle", -math.inf, math.inf)
    lp.add_constraint("cap", {gen: 1.0}, "<=", 10.0)
    lp.add_constraint("bal", {gen: 1.0, shed: 1.0, flow: -1.0}, "=", 4.25)
    lp.add_constraint("floor", {flow: 1.0}, ">=", -3.0)
    lp.obj_constant = 7.0
    return lp


def empty_lp():
    return LinearProgram("empty")


GOLDEN = {"one_var.mps": one_var_lp, "empty.mps": empty_lp, "mixed.mps": mixed_lp}


# -- on-disk datasets ----------------------------------------------------------

def write_csv(path, header: str, rows) -> None:
    lines = [header] + [",".join(str(v) for v in r) for r in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def minimal_dataset(root, hours: int = 4, periods: int = 1, scenarios=("S1",)):
    """One node with onshore wind and gas serving a flat 10 MW load."""
    root.mkdir(parents=True, exist_ok=True)
    P = range(1, periods + 1)
    write_csv(root / "nodes.csv", "node", [("A",)])
    write_csv(root / "commodities.csv", "commodity", [("Power",)])
    write_csv(root / "technologies.csv", "technology,kind,commodity,vres,electrolyzer,reservoir",
              [("onshore_wind", "production", "Power", 1, 0, 0), ("gas", "production", "Power", 0, 0, 0)])
    write_csv(root / "node_technologies.csv", "node,technology", [("A", "onshore_wind"), ("A", "gas")])
    write_csv(root / "arcs.csv", "commodity,from_node,to_node", [])
    write_csv(root / "scalars.csv", "name,value,unit", [("discount_rate", 0.05, "1")])
    write_csv(root / "lifetime.csv", "technology,value,unit", [("onshore_wind", 25, "years"), ("gas", 30, "years")])
    write_csv(root / "invest_cost.csv", "technology,period,value,unit",
              [("*", "*", 500, "kEUR/MW")])
    write_csv(root / "op_cost.csv", "technology,period,value,unit", [("*", "*", 30, "EUR/MWh")])
    write_csv(root / "availability.csv", "technology,node,period,scenario,hour,value,unit",
              [("onshore_wind", "A", i, w, h, 0.5, "fraction") for i in P for w in scenarios for h in range(hours)])
    write_csv(root / "demand.csv", "commodity,node,period,scenario,hour,value,unit",
              [("Power", "A", i, w, h, 10, "MW") for i in P for w in scenarios for h in range(hours)])
    return root
