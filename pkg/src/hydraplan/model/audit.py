"""Post-solve checks that recompute each rule from primal values and inputs.

These do not read the emitted rows; they restate the rules so a wrong
coefficient in an emitter shows up as a violation.
"""

from __future__ import annotations

import math
from collections import defaultdict

from ..dimensions import ModelDimensions
from ..parameters import ParameterStore, lifetime_window
from .assemble import AssembledModel
from .emitters import EXEMPT_SHARE


def row_violations(model: AssembledModel, x) -> dict[str, float]:
    """Largest violation of the emitted rows, grouped by row-name prefix."""
    act = model.lp.row_activity(x)
    out: dict[str, float] = defaultdict(float)
    for k, con in enumerate(model.lp.constraints):
        prefix = con.name.split("[", 1)[0]
        r = act[k] - con.rhs
        viol = max(r, 0.0) if con.sense == "<=" else max(-r, 0.0) if con.sense == ">=" else abs(r)
        out[prefix] = max(out[prefix], float(viol))
    return dict(out)


def _qualifying_supply(model, params, dims, x, n, h, i, w) -> float:
    cat, case = model.catalog, model.case
    terms = []
    for g in dims.techs_at(n):
        tech = dims.tech[g]
        if not tech.vres:
            continue
        a = 1.0 if tech.reservoir else params.alpha(g, n, h, i, w)
        if case.additionality:
            cap = math.fsum(x[cat.x[(g, n, j)]] for j in lifetime_window(i, params.lifetime[g]))
        else:
            cap = x[cat.v[(g, n, i)]]
        terms.append(a * cap)
    return math.fsum(terms)


def _electrolysis_power(model, params, dims, x, n, h, i, w) -> float:
    cat = model.catalog
    return math.fsum(params.electrolyzer_power[e] * x[cat.y_src[(e, n, h, i, w)]]
                     for e in dims.techs_at(n) if dims.tech[e].electrolyzer)


def green_cap_violation(model: AssembledModel, params: ParameterStore, dims: ModelDimensions, x) -> float:
    """Electrolysis power beyond qualifying VRES output, in the case's matching granularity."""
    case, cat = model.case, model.catalog
    if not (case.spatial or case.temporal):
        return 0.0
    worst = 0.0
    nodes = {i: cat.green_nodes(dims, i) for i in dims.periods}
    if case.spatial and case.temporal:
        for i in dims.periods:
            for n in nodes[i]:
                for w in dims.scenarios:
                    for h in dims.hours:
                        d = (_electrolysis_power(model, params, dims, x, n, h, i, w)
                             - _qualifying_supply(model, params, dims, x, n, h, i, w))
                        worst = max(worst, d)
    elif case.temporal:
        for w in dims.scenarios:
            for h in dims.hours:
                use = [_electrolysis_power(model, params, dims, x, n, h, i, w) for i in dims.periods for n in nodes[i]]
                sup = [_qualifying_supply(model, params, dims, x, n, h, i, w) for i in dims.periods for n in nodes[i]]
                worst = max(worst, math.fsum(use) - math.fsum(sup))
    else:
        for i in dims.periods:
            for n in nodes[i]:
                for w in dims.scenarios:
                    use = [_electrolysis_power(model, params, dims, x, n, h, i, w) for h in dims.hours]
                    sup = [_qualifying_supply(model, params, dims, x, n, h, i, w) for h in dims.hours]
                    worst = max(worst, math.fsum(use) - math.fsum(sup))
    return worst


def additionality_violation(model: AssembledModel, params: ParameterStore, dims: ModelDimensions, x) -> float:
    cat = model.catalog
    if not model.case.additionality:
        return 0.0
    worst = 0.0
    for i in dims.periods:
        for n in cat.green_nodes(dims, i):
            need = math.fsum(params.electrolyzer_power[e] * x[cat.x[(e, n, i)]]
                             for e in dims.techs_at(n) if dims.tech[e].electrolyzer)
            new = math.fsum(x[cat.x[(g, n, i)]] for g in dims.techs_at(n) if dims.tech[g].vres)
            worst = max(worst, need - new)
    return worst


def exemption_violation(model: AssembledModel, params: ParameterStore, dims: ModelDimensions, x) -> float:
    """How far an exempt node's VRES generation falls below 90% of its generation."""
    cat = model.catalog
    if not model.case.exemption90:
        return 0.0
    gens, vres = set(dims.generators), set(dims.vres)
    worst = 0.0
    for i in dims.periods:
        for n in cat.exempt_nodes(dims, i):
            for w in dims.scenarios:
                total = math.fsum(x[cat.y_src[(g, n, h, i, w)]] for g in dims.techs_at(n) if g in gens
                                  for h in dims.hours)
                ren = math.fsum(x[cat.y_src[(g, n, h, i, w)]] for g in dims.techs_at(n) if g in vres
                                for h in dims.hours)
                worst = max(worst, EXEMPT_SHARE * total - ren)
    return worst


def repurpose_violation(model: AssembledModel, params: ParameterStore, dims: ModelDimensions, x) -> float:
    cat = model.catalog
    worst = 0.0
    for link in cat.repurpose:
        cap = params.initial_transmission.get((link.ng_tech, link.a, link.b, dims.periods[0]), 0.0)
        total = math.fsum(x[cat.x_rep[(link.a, link.b, i)]] for i in dims.periods)
        worst = max(worst, total - cap)
        for i in dims.periods:
            worst = max(worst, -x[cat.v_trans[(link.ng_tech, link.a, link.b, i)]])
    return worst


def storage_boundary_violation(model: AssembledModel, dims: ModelDimensions, x) -> float:
    """Start and end levels of each season against half the installed storage capacity."""
    cat = model.catalog
    worst = 0.0
    for (b, n, h, i, w), var in cat.y_stor.items():
        half = 0.5 * x[cat.v[(b, n, i)]]
        if h in dims.last_hours:
            worst = max(worst, abs(x[var] - half))
        if h in dims.first_hours:
            inherited = half + x[cat.y_chrg[(b, n, h, i, w)]] - x[cat.y_dischrg[(b, n, h, i, w)]]
            worst = max(worst, abs(x[var] - inherited))
    return worst


def emission_violation(model: AssembledModel, params: ParameterStore, dims: ModelDimensions, x) -> float:
    cat = model.catalog
    scale = {h: s.scale for h, s in dims.season_of_hour.items()}
    emitted: dict = defaultdict(list)
    for (p, n, h, i, w), var in cat.y_src.items():
        eta = params.emission_intensity.get(p, 0.0)
        if eta:
            emitted[(i, w)].append(scale[h] * eta * x[var])
    worst = 0.0
    for i, cap in params.emission_cap.items():
        for w in dims.scenarios:
            worst = max(worst, math.fsum(emitted.get((i, w), ())) - cap)
    return worst


def fixed_h2_relative_error(model: AssembledModel, params: ParameterStore, dims: ModelDimensions, x) -> float:
    cat = model.catalog
    worst = 0.0
    prod: dict = defaultdict(list)
    for (p, n, h, i, w), var in cat.y_src.items():
        if dims.tech[p].electrolyzer:
            prod[(i, w)].append(x[var])
    for i, target in params.fixed_h2.items():
        rhs = target * model.h2_scale
        for w in dims.scenarios:
            err = abs(math.fsum(prod.get((i, w), ())) - rhs)
            worst = max(worst, err / rhs if rhs else err)
    return worst


def audit(model: AssembledModel, params: ParameterStore, dims: ModelDimensions, x) -> dict[str, float]:
    """Every independent check, as the largest violation found."""
    return {
        "green_cap": green_cap_violation(model, params, dims, x),
        "additionality": additionality_violation(model, params, dims, x),
        "exemption_share": exemption_violation(model, params, dims, x),
        "repurpose_cap": repurpose_violation(model, params, dims, x),
        "storage_boundary": storage_boundary_violation(model, dims, x),
        "emission_cap": emission_violation(model, params, dims, x),
        "fixed_h2_rel": fixed_h2_relative_error(model, params, dims, x),
        "rows": float(max(row_violations(model, x).values(), default=0.0)),
    }
