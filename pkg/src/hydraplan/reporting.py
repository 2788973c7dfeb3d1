"""Cost breakdowns, expected production, hydrogen maps and case-vs-case differences."""

from __future__ import annotations

import csv
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

from .dimensions import H2, NG, POWER, PRODUCTION, STORAGE, ModelDimensions
from .lp import Solution, Status
from .model import AssembledModel
from .parameters import ParameterStore


class ReportError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


COST_CATEGORIES = (
    "generator_capex", "generator_opex", "electrolyzer_capex", "electrolyzer_opex", "storage_capex",
    "power_transmission_capex", "h2_pipeline_capex", "ng_costs", "load_shed", "other",
)

# variable class, technology selector, category
CATEGORY_MAP = (
    ("x", "power generator", "generator_capex"),
    ("x", "electrolyzer", "electrolyzer_capex"),
    ("x", "storage (any commodity)", "storage_capex"),
    ("x", "NG production", "ng_costs"),
    ("x", "other production", "other"),
    ("x_trans", "Power transmission", "power_transmission_capex"),
    ("x_trans", "H2 transmission", "h2_pipeline_capex"),
    ("x_trans", "other transmission", "other"),
    ("x_rep", "NG pipeline repurposed to H2", "h2_pipeline_capex"),
    ("y_src", "power generator", "generator_opex"),
    ("y_src", "electrolyzer", "electrolyzer_opex"),
    ("y_src", "NG production (fuel supply)", "ng_costs"),
    ("y_src", "other production", "other"),
    ("y_ll", "any commodity", "load_shed"),
)


def _capex_category(dims: ModelDimensions, tech: str) -> str:
    t = dims.tech[tech]
    if t.electrolyzer:
        return "electrolyzer_capex"
    if t.kind == STORAGE:
        return "storage_capex"
    if t.kind == PRODUCTION and t.commodity == POWER:
        return "generator_capex"
    if t.kind == PRODUCTION and t.commodity == NG:
        return "ng_costs"
    if t.commodity == POWER:
        return "power_transmission_capex"
    if t.commodity == H2:
        return "h2_pipeline_capex"
    return "other"


def _opex_category(dims: ModelDimensions, tech: str) -> str:
    t = dims.tech[tech]
    if t.electrolyzer:
        return "electrolyzer_opex"
    if t.commodity == POWER:
        return "generator_opex"
    if t.commodity == NG:
        return "ng_costs"
    return "other"


def _key(k) -> str:
    return "|".join(str(p) for p in k) if isinstance(k, tuple) else str(k)


def _unkey(s: str, types: tuple) -> tuple:
    return tuple(t(p) for t, p in zip(types, s.split("|")))


@dataclass
class SolutionReport:
    case: str
    objective: float
    costs: dict[str, float]
    capacities: dict = field(default_factory=dict)         # (tech, location, i) -> (built, available)
    generation: dict = field(default_factory=dict)         # (tech, n, i) -> expected annual output
    hydrogen: dict = field(default_factory=dict)           # (n, i) -> expected annual H2 in ton
    capacity_factors: dict = field(default_factory=dict)   # (e, n, i) -> fraction or None
    exemption_share: dict = field(default_factory=dict)    # (n, i, w) -> VRES share or None
    signature: dict = field(default_factory=dict)
    h2_scale: float = 1.0
    row_counts: dict = field(default_factory=dict)

    @property
    def category_total(self) -> float:
        return math.fsum(self.costs.values())

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "objective": self.objective,
            "costs": dict(self.costs),
            "capacities": {_key(k): list(v) for k, v in self.capacities.items()},
            "generation": {_key(k): v for k, v in self.generation.items()},
            "hydrogen": {_key(k): v for k, v in self.hydrogen.items()},
            "capacity_factors": {_key(k): v for k, v in self.capacity_factors.items()},
            "exemption_share": {_key(k): v for k, v in self.exemption_share.items()},
            "signature": self.signature,
            "fixed_h2_convention": {
                "scale": self.h2_scale,
                "rule": "modeled-hours target = annual target * |H| / sum_s(alpha_s * |H^s|)",
            },
            "row_counts": dict(self.row_counts),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=False) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "SolutionReport":
        try:
            return cls(
                case=d["case"],
                objective=float(d["objective"]),
                costs={k: float(v) for k, v in d["costs"].items()},
                capacities={_unkey(k, (str, str, int)): tuple(v) for k, v in d["capacities"].items()},
                generation={_unkey(k, (str, str, int)): v for k, v in d["generation"].items()},
                hydrogen={_unkey(k, (str, int)): v for k, v in d["hydrogen"].items()},
                capacity_factors={_unkey(k, (str, str, int)): v for k, v in d["capacity_factors"].items()},
                exemption_share={_unkey(k, (str, int, str)): v for k, v in d["exemption_share"].items()},
                signature=d["signature"],
                h2_scale=float(d["fixed_h2_convention"]["scale"]),
                row_counts=d.get("row_counts", {}),
            )
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ReportError("DIMENSION_MISMATCH", f"report does not follow the schema: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "SolutionReport":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ReportError("DIMENSION_MISMATCH", f"report is not valid JSON: {exc}") from None


def signature(dims: ModelDimensions, params: ParameterStore) -> dict:
    return {
        "nodes": list(dims.nodes),
        "periods": list(dims.periods),
        "scenarios": list(dims.scenarios),
        "hours": len(dims.hours),
        "fixed_h2": {str(i): params.fixed_h2[i] for i in sorted(params.fixed_h2)},
    }


def cost_breakdown(model: AssembledModel, params: ParameterStore, dims: ModelDimensions, x) -> dict[str, float]:
    """Objective split by category, recomputed from cost inputs and primal values."""
    cat = model.catalog
    L = dims.period_length
    weight = params.weight(L)
    delta = {i: params.discount(i, L) for i in dims.periods}
    scale = {h: s.scale for h, s in dims.season_of_hour.items()}
    prob = dict(zip(dims.scenarios, dims.probabilities))
    terms: dict[str, list[float]] = defaultdict(list)
    for (t, n, i), var in cat.x.items():
        terms[_capex_category(dims, t)].append(delta[i] * params.invest_cost.get((t, i), 0.0) * x[var])
    for (t, a, b, i), var in cat.x_trans.items():
        terms[_capex_category(dims, t)].append(delta[i] * params.invest_cost.get((t, i), 0.0) * x[var])
    if cat.repurpose:
        h2 = cat.repurpose[0].h2_tech
        k = params.repurpose_cost_factor * params.repurpose_flow_factor
        for (a, b, i), var in cat.x_rep.items():
            terms["h2_pipeline_capex"].append(k * params.h2_pipeline_cost(h2, i) * delta[i] * x[var])
    for (p, n, h, i, w), var in cat.y_src.items():
        q = params.op_cost.get((p, i), 0.0)
        if q:
            terms[_opex_category(dims, p)].append(delta[i] * weight * prob[w] * scale[h] * q * x[var])
    for (c, n, h, i, w), var in cat.y_ll.items():
        terms["load_shed"].append(delta[i] * weight * prob[w] * scale[h] * params.shed_cost[(c, n, i)] * x[var])
    return {c: math.fsum(terms.get(c, ())) for c in COST_CATEGORIES}


def build_report(solution: Solution, model: AssembledModel, params: ParameterStore,
                 dims: ModelDimensions) -> SolutionReport:
    if solution.status != Status.OPTIMAL:
        raise ReportError("NOT_OPTIMAL", f"solution status is {solution.status.value}")
    x = solution.x
    cat = model.catalog
    scale = {h: s.scale for h, s in dims.season_of_hour.items()}
    prob = dict(zip(dims.scenarios, dims.probabilities))
    represented = math.fsum(s.scale * len(s.hours) for s in dims.seasons)

    capacities = {}
    for (t, n, i), var in cat.x.items():
        capacities[(t, n, i)] = (float(x[var]), float(x[cat.v[(t, n, i)]]))
    for (t, a, b, i), var in cat.v_trans.items():
        built = float(x[cat.x_trans[(t, a, b, i)]]) if (t, a, b, i) in cat.x_trans else 0.0
        capacities[(t, f"{a}-{b}", i)] = (built, float(x[var]))
    for (a, b, i), var in cat.x_rep.items():
        capacities[("repurposed", f"{a}-{b}", i)] = (float(x[var]), float(x[var]))

    out_terms: dict = defaultdict(list)
    for (p, n, h, i, w), var in cat.y_src.items():
        out_terms[(p, n, i)].append(prob[w] * scale[h] * x[var])
    expected = {k: math.fsum(v) for k, v in out_terms.items()}
    generation = {k: v for k, v in expected.items() if dims.tech[k[0]].commodity == POWER}
    h2_terms: dict = defaultdict(list)
    cfs = {}
    for (p, n, i), v in expected.items():
        if dims.tech[p].electrolyzer:
            h2_terms[(n, i)].append(v)
            cap = float(x[cat.v[(p, n, i)]])
            cfs[(p, n, i)] = v / (cap * represented) if cap > 1e-9 else None
    hydrogen = {(n, i): math.fsum(h2_terms.get((n, i), ())) for i in dims.periods for n in dims.nodes
                if any(dims.tech[t].electrolyzer for t in dims.techs_at(n))}

    shares = {}
    if model.case.exemption90:
        gens, vres = set(dims.generators), set(dims.vres)
        for i in dims.periods:
            for n in cat.exempt_nodes(dims, i):
                for w in dims.scenarios:
                    tot = [x[cat.y_src[(g, n, h, i, w)]] for g in dims.techs_at(n) if g in gens for h in dims.hours]
                    ren = [x[cat.y_src[(g, n, h, i, w)]] for g in dims.techs_at(n) if g in vres for h in dims.hours]
                    total = math.fsum(tot)
                    shares[(n, i, w)] = math.fsum(ren) / total if total > 1e-9 else None

    return SolutionReport(
        case=model.case.name,
        objective=float(solution.objective),
        costs=cost_breakdown(model, params, dims, x),
        capacities=capacities,
        generation=generation,
        hydrogen=hydrogen,
        capacity_factors=cfs,
        exemption_share=shares,
        signature=signature(dims, params),
        h2_scale=model.h2_scale,
        row_counts=dict(model.row_counts),
    )


def expected_capacity_factor(report: SolutionReport, period: int) -> float | None:
    """Fleet capacity factor of electrolysis in ``period``: output over output at full load."""
    num, den = [], []
    for (e, n, i), (built, avail) in report.capacities.items():
        if i != period or (e, n, i) not in report.capacity_factors:
            continue
        cf = report.capacity_factors[(e, n, i)]
        if cf is not None:
            num.append(cf * avail)
            den.append(avail)
    total = math.fsum(den)
    return math.fsum(num) / total if total > 0 else None


# -- differences -------------------------------------------------------------

@dataclass
class ReportDiff:
    a: str
    b: str
    rows: list[tuple[str, str, float, float, float]]   # section, key, a, b, b - a

    @property
    def objective_delta(self) -> float:
        return next(r[4] for r in self.rows if r[0] == "objective")

    def section(self, name: str) -> dict[str, float]:
        return {r[1]: r[4] for r in self.rows if r[0] == name}


def diff_reports(a: SolutionReport, b: SolutionReport) -> ReportDiff:
    if a.signature != b.signature:
        raise ReportError("DIMENSION_MISMATCH", "reports differ in dimensions or hydrogen targets")
    rows = [("objective", "total", a.objective, b.objective, b.objective - a.objective)]
    for c in COST_CATEGORIES:
        va, vb = a.costs.get(c, 0.0), b.costs.get(c, 0.0)
        rows.append(("cost", c, va, vb, vb - va))
    for section, da, db in (("hydrogen", a.hydrogen, b.hydrogen), ("generation", a.generation, b.generation)):
        for k in sorted(set(da) | set(db), key=_key):
            va, vb = da.get(k, 0.0), db.get(k, 0.0)
            rows.append((section, _key(k), va, vb, vb - va))
    ca = {k: v[0] for k, v in a.capacities.items()}
    cb = {k: v[0] for k, v in b.capacities.items()}
    for k in sorted(set(ca) | set(cb), key=_key):
        va, vb = ca.get(k, 0.0), cb.get(k, 0.0)
        rows.append(("built", _key(k), va, vb, vb - va))
    return ReportDiff(a.case, b.case, rows)


# -- files -------------------------------------------------------------------

def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def _write(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_report_files(report: SolutionReport, out_dir) -> list[Path]:
    """``costs_``, ``generation_``, ``hydrogen_``, ``capacity_<case>.csv`` and ``report_<case>.json``."""
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    c = report.case
    paths = [d / f"costs_{c}.csv", d / f"generation_{c}.csv", d / f"hydrogen_{c}.csv",
             d / f"capacity_{c}.csv", d / f"report_{c}.json"]
    _write(paths[0], ["category", "value_eur"],
           [(k, _fmt(v)) for k, v in report.costs.items()] + [("objective", _fmt(report.objective))])
    _write(paths[1], ["technology", "node", "period", "expected_mwh_per_year"],
           [(t, n, i, _fmt(v)) for (t, n, i), v in report.generation.items()])
    _write(paths[2], ["node", "period", "expected_ton_per_year"],
           [(n, i, _fmt(v)) for (n, i), v in report.hydrogen.items()])
    cap_rows = []
    for (t, loc, i), (built, avail) in report.capacities.items():
        cf = report.capacity_factors.get((t, loc, i))
        cap_rows.append((t, loc, i, _fmt(built), _fmt(avail), _fmt(cf)))
    _write(paths[3], ["technology", "location", "period", "built", "available", "capacity_factor"], cap_rows)
    paths[4].write_text(report.to_json(), encoding="utf-8")
    return paths


def write_diff(diff: ReportDiff, path) -> Path:
    p = Path(path)
    _write(p, ["section", "key", diff.a, diff.b, "delta"],
           [(s, k, _fmt(va), _fmt(vb), _fmt(dv)) for s, k, va, vb, dv in diff.rows])
    return p


def read_report(path) -> SolutionReport:
    return SolutionReport.from_json(Path(path).read_text(encoding="utf-8"))


__all__ = ["COST_CATEGORIES", "CATEGORY_MAP", "ReportDiff", "ReportError", "SolutionReport",
           "build_report", "cost_breakdown", "diff_reports", "expected_capacity_factor", "read_report",
           "signature", "write_diff", "write_report_files"]
