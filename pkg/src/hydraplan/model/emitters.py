"""One emitter per equation family.

Emitters are pure: they read the catalog, parameters and dimensions and
return rows (or objective coefficients) without touching the LP.  Row
coefficient maps are keyed by variable handle.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

from ..dimensions import CO2, NG, POWER, ModelDimensions
from ..lp import EQ, LE
from ..parameters import ParameterStore, lifetime_window
from .cases import CaseConfig
from .catalog import DecisionVariableCatalog, _name

EXEMPT_SHARE = 0.9


@dataclass(frozen=True)
class Row:
    name: str
    coeffs: dict
    sense: str
    rhs: float


def _acc(d: dict, var: int, c: float) -> None:
    if c:
        d[var] = d.get(var, 0.0) + c


def _season_scale(dims: ModelDimensions) -> dict[int, float]:
    return {h: s.scale for h, s in dims.season_of_hour.items()}


# -- objective ---------------------------------------------------------------

def emit_objective(cat: DecisionVariableCatalog, params: ParameterStore, dims: ModelDimensions) -> dict:
    """Discounted investment cost plus expected, annualized operating and shedding cost."""
    L = dims.period_length
    weight = params.weight(L)
    delta = {i: params.discount(i, L) for i in dims.periods}
    alpha_s = _season_scale(dims)
    prob = dict(zip(dims.scenarios, dims.probabilities))
    out: dict = {}
    for (t, n, i), var in cat.x.items():
        _acc(out, var, delta[i] * params.invest_cost.get((t, i), 0.0))
    for (t, a, b, i), var in cat.x_trans.items():
        _acc(out, var, delta[i] * params.invest_cost.get((t, i), 0.0))
    for (p, n, h, i, w), var in cat.y_src.items():
        _acc(out, var, delta[i] * weight * prob[w] * alpha_s[h] * params.op_cost.get((p, i), 0.0))
    for (c, n, h, i, w), var in cat.y_ll.items():
        _acc(out, var, delta[i] * weight * prob[w] * alpha_s[h] * params.shed_cost[(c, n, i)])
    return out


def emit_repurpose_cost(cat: DecisionVariableCatalog, params: ParameterStore, dims: ModelDimensions) -> dict:
    """kappa * eta * (new H2 pipeline cost) * discount, per unit of repurposed NG capacity."""
    out: dict = {}
    if not cat.repurpose:
        return out
    h2_tech = cat.repurpose[0].h2_tech
    k = params.repurpose_cost_factor * params.repurpose_flow_factor
    for (a, b, i), var in cat.x_rep.items():
        _acc(out, var, k * params.h2_pipeline_cost(h2_tech, i) * params.discount(i, dims.period_length))
    return out


# -- flow balance ------------------------------------------------------------

def sink_terms(cat: DecisionVariableCatalog, params: ParameterStore, dims: ModelDimensions,
               c: str, n: str, h: int, i: int, w: str) -> dict:
    """Endogenous consumption of ``c`` at a node: fuel inputs and, for power, electrolysis."""
    out: dict = {}
    for p in dims.techs_at(n):
        key = (p, n, h, i, w)
        if key not in cat.y_src:
            continue
        fuel = params.fuel_use.get(p)
        if fuel is not None and fuel[0] == c:
            _acc(out, cat.y_src[key], fuel[1])
        if c == POWER and dims.tech[p].electrolyzer:
            _acc(out, cat.y_src[key], params.electrolyzer_power[p])
    return out


def emit_flow_balance(cat: DecisionVariableCatalog, params: ParameterStore, dims: ModelDimensions) -> list[Row]:
    rows = []
    trans_by_c = {c: dims.transmission(c) for c in dims.commodities}
    for i in dims.periods:
        for w in dims.scenarios:
            for h in dims.hours:
                for c in dims.commodities:
                    for n in dims.nodes:
                        co: dict = {}
                        for p in dims.techs_at(n):
                            tech = dims.tech[p]
                            if tech.commodity != c:
                                continue
                            key = (p, n, h, i, w)
                            if key in cat.y_src:
                                _acc(co, cat.y_src[key], 1.0)
                            elif key in cat.y_chrg:
                                _acc(co, cat.y_chrg[key], -1.0)
                                _acc(co, cat.y_dischrg[key], 1.0)
                        for var, coef in sink_terms(cat, params, dims, c, n, h, i, w).items():
                            _acc(co, var, -coef)
                        for t in trans_by_c[c]:
                            for m in dims.neighbors(c, n):
                                _acc(co, cat.y_trans[(t, n, m, h, i, w)], -1.0)
                                _acc(co, cat.y_trans[(t, m, n, h, i, w)], 1.0)
                        ll = cat.y_ll.get((c, n, h, i, w))
                        if ll is not None:
                            _acc(co, ll, 1.0)
                        rows.append(Row(_name("balance", c, n, h, i, w), co, EQ,
                                        params.demand.get((c, n, h, i, w), 0.0)))
    return rows


# -- capacity ----------------------------------------------------------------

def emit_capacity_accounting(cat: DecisionVariableCatalog, params: ParameterStore,
                             dims: ModelDimensions) -> list[Row]:
    """``v_i - sum of x over the lifetime window = initial capacity``.

    Arcs handled by the repurposing family are skipped here.
    """
    rows = []
    for (t, n, i), var in cat.v.items():
        co = {var: 1.0}
        for j in lifetime_window(i, params.lifetime[t]):
            _acc(co, cat.x[(t, n, j)], -1.0)
        rows.append(Row(_name("capacity", t, n, i), co, EQ, params.initial_capacity.get((t, n, i), 0.0)))
    linked = _linked_arcs(cat)
    for (t, a, b, i), var in cat.v_trans.items():
        if (t, a, b) in linked:
            continue
        co = {var: 1.0}
        if (t, a, b, i) in cat.x_trans:
            for j in lifetime_window(i, params.lifetime[t]):
                _acc(co, cat.x_trans[(t, a, b, j)], -1.0)
        rows.append(Row(_name("capacity", t, a, b, i), co, EQ,
                        params.initial_transmission.get((t, a, b, i), 0.0)))
    return rows


def _linked_arcs(cat: DecisionVariableCatalog) -> set:
    out = set()
    for link in cat.repurpose:
        out.add((link.ng_tech, link.a, link.b))
        out.add((link.h2_tech, link.a, link.b))
    return out


# -- operation ---------------------------------------------------------------

def emit_operation_limits(cat: DecisionVariableCatalog, params: ParameterStore, dims: ModelDimensions) -> list[Row]:
    """Output, storage level and flows within available capacity; seasonal hydro budgets."""
    rows = []
    for (p, n, h, i, w), var in cat.y_src.items():
        tech = dims.tech[p]
        a = params.alpha(p, n, h, i, w) if tech.vres and not tech.reservoir else 1.0
        co = {var: 1.0}
        _acc(co, cat.v[(p, n, i)], -a)
        rows.append(Row(_name("maxop", p, n, h, i, w), co, LE, 0.0))
    for (b, n, h, i, w), var in cat.y_stor.items():
        rows.append(Row(_name("maxstor", b, n, h, i, w), {var: 1.0, cat.v[(b, n, i)]: -1.0}, LE, 0.0))
    for (t, n, m, h, i, w), var in cat.y_trans.items():
        a, b = (n, m) if (t, n, m, i) in cat.v_trans else (m, n)
        rows.append(Row(_name("maxflow", t, n, m, h, i, w), {var: 1.0, cat.v_trans[(t, a, b, i)]: -1.0}, LE, 0.0))
    for n, g in ((n, g) for n, g in dims.node_technologies if dims.tech[g].reservoir):
        for s in dims.seasons:
            for i in dims.periods:
                for w in dims.scenarios:
                    co = {cat.y_src[(g, n, h, i, w)]: 1.0 for h in s.hours}
                    rows.append(Row(_name("hydro", g, n, s.name, i, w), co, LE,
                                    params.hydro_budget[(g, n, s.name, i, w)]))
    return rows


# -- storage -----------------------------------------------------------------

def emit_storage_dynamics(cat: DecisionVariableCatalog, dims: ModelDimensions) -> list[Row]:
    """Level carry-over inside each season; levels start and end at half capacity."""
    rows = []
    first, last = dims.first_hours, dims.last_hours
    for (b, n, h, i, w), level in cat.y_stor.items():
        co = {level: -1.0}
        _acc(co, cat.y_chrg[(b, n, h, i, w)], 1.0)
        _acc(co, cat.y_dischrg[(b, n, h, i, w)], -1.0)
        if h in first:
            _acc(co, cat.v[(b, n, i)], 0.5)
        else:
            _acc(co, cat.y_stor[(b, n, h - 1, i, w)], 1.0)
        rows.append(Row(_name("storage", b, n, h, i, w), co, EQ, 0.0))
        if h in last:
            rows.append(Row(_name("storage_end", b, n, h, i, w), {level: 1.0, cat.v[(b, n, i)]: -0.5}, EQ, 0.0))
    return rows


# -- resource limits and emissions ------------------------------------------

def emit_resource_limits(cat: DecisionVariableCatalog, params: ParameterStore, dims: ModelDimensions) -> list[Row]:
    """Horizon budgets per scenario: NG production and CO2 sequestration."""
    rows = []
    L = dims.period_length
    alpha_s = _season_scale(dims)
    for (c, n), limit in params.resource_limit.items():
        if c not in (NG, CO2) or c not in dims.commodities:
            continue
        for w in dims.scenarios:
            co: dict = {}
            for i in dims.periods:
                for h in dims.hours:
                    if c == NG:
                        for p in dims.techs_at(n):
                            key = (p, n, h, i, w)
                            if dims.tech[p].commodity == NG and key in cat.y_src:
                                _acc(co, cat.y_src[key], L * alpha_s[h])
                    else:
                        for var, coef in sink_terms(cat, params, dims, c, n, h, i, w).items():
                            _acc(co, var, L * alpha_s[h] * coef)
            rows.append(Row(_name("limit", c, n, w), co, LE, limit))
    return rows


def emit_emission_cap(cat: DecisionVariableCatalog, params: ParameterStore, dims: ModelDimensions) -> list[Row]:
    rows = []
    alpha_s = _season_scale(dims)
    by_iw: dict = defaultdict(dict)
    for (p, n, h, i, w), var in cat.y_src.items():
        eta = params.emission_intensity.get(p, 0.0)
        if eta and i in params.emission_cap:
            _acc(by_iw[(i, w)], var, alpha_s[h] * eta)
    for i in dims.periods:
        if i not in params.emission_cap:
            continue
        for w in dims.scenarios:
            rows.append(Row(_name("emission", i, w), dict(by_iw.get((i, w), {})), LE, params.emission_cap[i]))
    return rows


# -- green hydrogen ----------------------------------------------------------

def _new_vres(cat: DecisionVariableCatalog, params: ParameterStore, g: str, n: str, i: int) -> dict:
    """Build variables of ``g`` at ``n`` still alive in period ``i``."""
    return {cat.x[(g, n, j)]: 1.0 for j in lifetime_window(i, params.lifetime[g])}


def _green_supply(cat, params, dims, case, n, h, i, w, out: dict) -> None:
    """Add ``sum_g alpha * (qualifying VRES capacity)`` at ``(n, h, i, w)`` to ``out``."""
    for g in dims.techs_at(n):
        tech = dims.tech[g]
        if not tech.vres:
            continue
        a = 1.0 if tech.reservoir else params.alpha(g, n, h, i, w)
        if case.additionality:
            for var, c in _new_vres(cat, params, g, n, i).items():
                _acc(out, var, a * c)
        else:
            _acc(out, cat.v[(g, n, i)], a)


def emit_green_hydrogen(cat: DecisionVariableCatalog, params: ParameterStore, dims: ModelDimensions,
                        case: CaseConfig) -> list[Row]:
    """Additionality, green power cap (in its case variant), power-to-H2 and the 90% exemption."""
    rows: list[Row] = []
    if not case.green and not case.exemption90:
        return rows
    P, H, W = dims.periods, dims.hours, dims.scenarios
    elec_at = {n: [e for e in dims.techs_at(n) if dims.tech[e].electrolyzer] for n in dims.nodes}

    if case.additionality:
        for i in P:
            for n in cat.green_nodes(dims, i):
                if not elec_at[n]:
                    continue
                co: dict = {}
                for e in elec_at[n]:
                    _acc(co, cat.x[(e, n, i)], params.electrolyzer_power[e])
                for g in dims.techs_at(n):
                    if dims.tech[g].vres:
                        _acc(co, cat.x[(g, n, i)], -1.0)
                rows.append(Row(_name("additionality", n, i), co, LE, 0.0))

    if case.spatial and case.temporal:
        for (n, h, i, w), var in cat.y_pw4h2.items():
            supply: dict = {}
            _green_supply(cat, params, dims, case, n, h, i, w, supply)
            co = {var: 1.0}
            for k, c in supply.items():
                _acc(co, k, -c)
            rows.append(Row(_name("greencap", n, h, i, w), co, LE, 0.0))
    elif case.temporal:
        for w in W:
            for h in H:
                co = {}
                for i in P:
                    for n in cat.green_nodes(dims, i):
                        var = cat.y_pw4h2.get((n, h, i, w))
                        if var is not None:
                            _acc(co, var, 1.0)
                        supply: dict = {}
                        _green_supply(cat, params, dims, case, n, h, i, w, supply)
                        for k, c in supply.items():
                            _acc(co, k, -c)
                rows.append(Row(_name("greencap", h, w), co, LE, 0.0))
    elif case.spatial:
        for i in P:
            for n in cat.green_nodes(dims, i):
                for w in W:
                    co = {}
                    for h in H:
                        var = cat.y_pw4h2.get((n, h, i, w))
                        if var is not None:
                            _acc(co, var, 1.0)
                        supply = {}
                        _green_supply(cat, params, dims, case, n, h, i, w, supply)
                        for k, c in supply.items():
                            _acc(co, k, -c)
                    rows.append(Row(_name("greencap", n, i, w), co, LE, 0.0))

    for (n, h, i, w), var in cat.y_pw4h2.items():
        co = {var: -1.0}
        for e in elec_at[n]:
            _acc(co, cat.y_src[(e, n, h, i, w)], params.electrolyzer_power[e])
        rows.append(Row(_name("pw4h2", n, h, i, w), co, LE, 0.0))

    if case.exemption90:
        gens = set(dims.generators)
        for i in P:
            for n in cat.exempt_nodes(dims, i):
                for w in W:
                    co = {}
                    for g in dims.techs_at(n):
                        if g not in gens:
                            continue
                        share = EXEMPT_SHARE - (1.0 if dims.tech[g].vres else 0.0)
                        for h in H:
                            _acc(co, cat.y_src[(g, n, h, i, w)], share)
                    rows.append(Row(_name("exempt", n, i, w), co, LE, 0.0))
    return rows


# -- repurposing -------------------------------------------------------------

def emit_pipeline_repurposing(cat: DecisionVariableCatalog, params: ParameterStore,
                              dims: ModelDimensions) -> list[Row]:
    """NG capacity shrinks by what is repurposed; H2 capacity gains eta times that."""
    rows = []
    eta = params.repurpose_flow_factor
    P = dims.periods
    for link in cat.repurpose:
        a, b = link.a, link.b
        ng0 = params.initial_transmission.get((link.ng_tech, a, b, P[0]), 0.0)
        for i in P:
            co = {cat.v_trans[(link.ng_tech, a, b, i)]: 1.0}
            for j in P:
                if j <= i:
                    _acc(co, cat.x_rep[(a, b, j)], 1.0)
            rows.append(Row(_name("ngcap", a, b, i), co, EQ, ng0))
        rows.append(Row(_name("maxrep", a, b), {cat.x_rep[(a, b, i)]: 1.0 for i in P}, LE, ng0))
        for i in P:
            co = {cat.v_trans[(link.h2_tech, a, b, i)]: 1.0}
            for j in lifetime_window(i, params.lifetime[link.h2_tech]):
                _acc(co, cat.x_trans[(link.h2_tech, a, b, j)], -1.0)
                _acc(co, cat.x_rep[(a, b, j)], -eta)
            rows.append(Row(_name("h2cap", a, b, i), co, EQ,
                            params.initial_transmission.get((link.h2_tech, a, b, i), 0.0)))
    return rows


# -- fixed hydrogen ----------------------------------------------------------

def fixed_h2_scale(dims: ModelDimensions) -> float:
    """Fraction of an annual target produced over the modeled hours.

    With ``alpha_s = represented hours / |H^s|`` a flat production rate meeting
    ``H`` tons per year yields ``H * |H| / sum_s alpha_s |H^s|`` over the
    modeled hours.
    """
    return len(dims.hours) / math.fsum(s.scale * len(s.hours) for s in dims.seasons)


def emit_fixed_hydrogen(cat: DecisionVariableCatalog, params: ParameterStore, dims: ModelDimensions) -> list[Row]:
    rows = []
    if not params.fixed_h2:
        return rows
    scale = fixed_h2_scale(dims)
    by_iw: dict = defaultdict(dict)
    for (p, n, h, i, w), var in cat.y_src.items():
        if dims.tech[p].electrolyzer:
            _acc(by_iw[(i, w)], var, 1.0)
    for i in dims.periods:
        for w in dims.scenarios:
            rows.append(Row(_name("fixedh2", i, w), dict(by_iw.get((i, w), {})), EQ, params.fixed_h2[i] * scale))
    return rows

