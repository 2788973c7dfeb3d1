"""Decision variables of the deterministic equivalent and their LP handles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..dimensions import H2, NG, STORAGE, TRANSMISSION, ModelDimensions
from ..lp import LinearProgram
from ..parameters import ParameterStore, investable
from .cases import CaseConfig


def _name(prefix: str, *idx) -> str:
    return f"{prefix}[{','.join(str(k) for k in idx)}]"


@dataclass(frozen=True)
class RepurposeLink:
    """An NG arc whose capacity may move to the H2 pipeline of the same node pair."""

    ng_tech: str
    h2_tech: str
    a: str
    b: str


@dataclass
class DecisionVariableCatalog:
    """Handles into a :class:`LinearProgram`, keyed by index tuples.

    First stage: ``x``/``v`` for production and storage ``(tech, n, i)``,
    ``x_trans``/``v_trans`` for undirected arcs ``(tech, a, b, i)`` and
    ``x_rep`` ``(a, b, i)``.  Second stage adds the period, hour and
    scenario: ``y_src (p, n, h, i, w)``, ``y_ll (c, n, h, i, w)``,
    ``y_chrg``/``y_dischrg``/``y_stor (b, n, h, i, w)``,
    ``y_trans (t, n, m, h, i, w)`` for the flow from ``n`` to ``m`` and
    ``y_pw4h2 (n, h, i, w)``.
    """

    case: CaseConfig
    x: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)
    x_trans: dict = field(default_factory=dict)
    v_trans: dict = field(default_factory=dict)
    x_rep: dict = field(default_factory=dict)
    y_src: dict = field(default_factory=dict)
    y_ll: dict = field(default_factory=dict)
    y_chrg: dict = field(default_factory=dict)
    y_dischrg: dict = field(default_factory=dict)
    y_stor: dict = field(default_factory=dict)
    y_trans: dict = field(default_factory=dict)
    y_pw4h2: dict = field(default_factory=dict)
    repurpose: tuple[RepurposeLink, ...] = ()

    def green_nodes(self, dims: ModelDimensions, i: int) -> tuple[str, ...]:
        """Nodes bound by the green rules in period ``i``."""
        exempt = set(self.exempt_nodes(dims, i))
        return tuple(n for n in dims.nodes if n not in exempt)

    def exempt_nodes(self, dims: ModelDimensions, i: int) -> tuple[str, ...]:
        return dims.exempt_nodes(i) if self.case.exemption90 else ()

    def families(self) -> dict[str, dict]:
        return {"x": self.x, "v": self.v, "x_trans": self.x_trans, "v_trans": self.v_trans,
                "x_rep": self.x_rep, "y_src": self.y_src, "y_ll": self.y_ll, "y_chrg": self.y_chrg,
                "y_dischrg": self.y_dischrg, "y_stor": self.y_stor, "y_trans": self.y_trans,
                "y_pw4h2": self.y_pw4h2}


def repurpose_links(dims: ModelDimensions) -> tuple[RepurposeLink, ...]:
    """NG arcs that also carry an H2 pipeline; the first type of each commodity is used."""
    ng, h2 = dims.transmission(NG), dims.transmission(H2)
    if not ng or not h2:
        return ()
    h2_arcs = set(dims.undirected_arcs(H2))
    return tuple(RepurposeLink(ng[0], h2[0], a, b) for a, b in dims.undirected_arcs(NG) if (a, b) in h2_arcs)


def build_catalog(lp: LinearProgram, dims: ModelDimensions, params: ParameterStore, case: CaseConfig,
                  repurposing: bool = True) -> DecisionVariableCatalog:
    """Create every variable with its bounds (objective coefficients are added later)."""
    cat = DecisionVariableCatalog(case)
    if repurposing:
        cat.repurpose = repurpose_links(dims)
    add = lp.add_variable
    P = dims.periods

    for n, t in dims.node_technologies:
        tech = dims.tech[t]
        if tech.kind == TRANSMISSION:
            continue
        for i in P:
            ub = params.max_build.get((t, n, i), math.inf)
            cat.x[(t, n, i)] = add(_name("x", t, n, i), 0.0, ub)
            cat.v[(t, n, i)] = add(_name("v", t, n, i))

    for t in (t.name for t in dims.technologies if t.kind == TRANSMISSION):
        for a, b in dims.undirected_arcs(dims.tech[t].commodity):
            for i in P:
                if investable(dims, t):
                    cat.x_trans[(t, a, b, i)] = add(_name("xt", t, a, b, i))
                cat.v_trans[(t, a, b, i)] = add(_name("vt", t, a, b, i))

    for link in cat.repurpose:
        for i in P:
            cat.x_rep[(link.a, link.b, i)] = add(_name("xrep", link.a, link.b, i))

    green = case.green
    for i in P:
        green_nodes = set(cat.green_nodes(dims, i)) if green else set()
        for w in dims.scenarios:
            for h in dims.hours:
                for n in dims.nodes:
                    techs = dims.techs_at(n)
                    for t in techs:
                        tech = dims.tech[t]
                        if tech.kind == STORAGE:
                            k = (t, n, h, i, w)
                            cat.y_chrg[k] = add(_name("ychrg", *k))
                            cat.y_dischrg[k] = add(_name("ydis", *k))
                            cat.y_stor[k] = add(_name("ystor", *k))
                        elif tech.kind != TRANSMISSION:
                            k = (t, n, h, i, w)
                            cat.y_src[k] = add(_name("y", *k))
                    for c in dims.commodities:
                        if (c, n, i) in params.shed_cost:
                            k = (c, n, h, i, w)
                            cat.y_ll[k] = add(_name("yll", *k))
                    if n in green_nodes and any(dims.tech[t].electrolyzer for t in techs):
                        k = (n, h, i, w)
                        cat.y_pw4h2[k] = add(_name("ypw4h2", *k))
                for t in dims.transmission():
                    for a, b in dims.undirected_arcs(dims.tech[t].commodity):
                        for n, m in ((a, b), (b, a)):
                            k = (t, n, m, h, i, w)
                            cat.y_trans[k] = add(_name("yt", *k))
    return cat
