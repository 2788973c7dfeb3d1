"""Exogenous model data: costs, capacities, limits and the hourly stochastic tables.

All CSV inputs share one layout: index columns, then ``value`` and ``unit``.
Index cells may hold ``*`` to mean "every member of that set"; later rows
override earlier ones.  Values are converted to internal units on load.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

from .dimensions import (H2, NG, POWER, PRODUCTION, STORAGE, TRANSMISSION, ModelDimensions,
                         read_csv_rows)
from .errors import DataError, Issue
from .units import UnitError, amount_unit, conversion_factor, rate_unit


def period_discount(i: int, r: float, L: int, sign: int = -1) -> float:
    """Present-value factor of period ``i``: ``(1+r)**(sign*L*(i-1))``.

    ``sign=-1`` discounts to the first year of period 1; ``sign=+1`` gives the
    positive-exponent reading used for comparison runs.
    """
    if i < 1:
        raise ValueError("periods are numbered from 1")
    return (1.0 + r) ** (sign * L * (i - 1))


def operational_weight(r: float, L: int) -> float:
    """Discounted number of operating years in a period of ``L`` years."""
    if L < 1:
        raise ValueError("period length must be at least 1")
    return math.fsum((1.0 + r) ** (-j) for j in range(L))


def lifetime_window(i: int, lifetime: int) -> range:
    """Build periods still alive in period ``i``: ``max(1, i - lifetime) .. i``."""
    return range(max(1, i - lifetime), i + 1)


@dataclass(frozen=True)
class ScenarioTables:
    """Hourly stochastic inputs, keyed by full index tuples."""

    availability: dict = field(default_factory=dict)   # (g, n, h, i, w) -> fraction
    demand: dict = field(default_factory=dict)         # (c, n, h, i, w) -> rate
    hydro_budget: dict = field(default_factory=dict)   # (g, n, season, i, w) -> MWh


@dataclass(frozen=True)
class ParameterStore:
    discount_rate: float
    lifetime: dict                      # tech -> periods
    invest_cost: dict                   # (tech, i) -> EUR per capacity unit
    op_cost: dict                       # (tech, i) -> EUR per produced unit
    shed_cost: dict                     # (c, n, i) -> EUR per unserved unit
    initial_capacity: dict              # (tech, n, i) -> capacity
    initial_transmission: dict          # (tech, n, m, i) -> capacity, n before m in node order
    emission_intensity: dict            # tech -> tCO2 per produced unit
    emission_cap: dict                  # i -> tCO2 per year
    resource_limit: dict                # (c, n) -> amount over the horizon
    electrolyzer_power: dict            # e -> MWh per ton
    fuel_use: dict                      # tech -> (commodity, input per output unit)
    max_build: dict                     # (tech, n, i) -> capacity per period
    fixed_h2: dict                      # i -> ton per year
    repurpose_cost_factor: float = 0.0
    repurpose_flow_factor: float = 0.0
    discount_sign: int = -1
    availability: dict = field(default_factory=dict)
    demand: dict = field(default_factory=dict)
    hydro_budget: dict = field(default_factory=dict)

    def discount(self, i: int, L: int) -> float:
        return period_discount(i, self.discount_rate, L, self.discount_sign)

    def weight(self, L: int) -> float:
        return operational_weight(self.discount_rate, L)

    def alpha(self, g: str, n: str, h: int, i: int, w: str) -> float:
        return self.availability.get((g, n, h, i, w), 1.0)

    def h2_pipeline_cost(self, tech: str, i: int) -> float:
        return self.invest_cost.get((tech, i), 0.0)

    def with_scenarios(self, tables: ScenarioTables) -> "ParameterStore":
        av = dict(self.availability)
        av.update(tables.availability)
        dem = dict(self.demand)
        dem.update(tables.demand)
        hb = dict(self.hydro_budget)
        hb.update(tables.hydro_budget)
        return replace(self, availability=av, demand=dem, hydro_budget=hb)


def capacity_unit(dims: ModelDimensions, tech: str) -> str:
    t = dims.tech[tech]
    return amount_unit(t.commodity) if t.kind == STORAGE else rate_unit(t.commodity)


def output_unit(dims: ModelDimensions, tech: str) -> str:
    return amount_unit(dims.tech[tech].commodity)


def investable(dims: ModelDimensions, tech: str) -> bool:
    """Natural-gas pipelines cannot be expanded; everything else can."""
    t = dims.tech[tech]
    return not (t.kind == TRANSMISSION and t.commodity == NG)


class _Reader:
    def __init__(self, data_dir: Path, dims: ModelDimensions, issues: list[Issue],
                 unit_overrides: dict[str, str] | None = None):
        self.dir = data_dir
        self.unit_overrides = unit_overrides or {}
        self.dims = dims
        self.issues = issues
        self.domains: dict[str, tuple] = {
            "node": dims.nodes, "from_node": dims.nodes, "to_node": dims.nodes,
            "period": dims.periods, "scenario": dims.scenarios, "hour": dims.hours,
            "technology": tuple(t.name for t in dims.technologies),
            "commodity": dims.commodities, "season": tuple(s.name for s in dims.seasons),
        }

    def _parse_index(self, col: str, raw: str, where, src):
        dom = self.domains.get(col)
        if raw == "*":
            if dom is None:
                self.issues.append(Issue("UNKNOWN_INDEX", f"wildcard not allowed in column {col!r}", where, src))
                return None
            return list(dom)
        val: object = raw
        if col in ("period", "hour"):
            try:
                val = int(raw)
            except ValueError:
                self.issues.append(Issue("UNKNOWN_INDEX", f"{col} {raw!r} is not an integer", where, src))
                return None
        if dom is not None and val not in dom:
            self.issues.append(Issue("UNKNOWN_INDEX", f"{col} {raw!r} is not declared", where, src))
            return None
        return [val]

    def read(self, fname: str, index: tuple[str, ...], unit: Callable[[tuple], str] | str,
             required: bool = False, allow_negative: bool = False,
             bounds: tuple[float, float] | None = None) -> dict:
        path = self.dir / fname
        src = str(path)
        if not path.exists():
            if required:
                self.issues.append(Issue("MISSING_FILE", f"required file not found: {path}", source=src))
            return {}
        header, rows = read_csv_rows(path)
        missing_cols = [c for c in (*index, "value", "unit") if c not in header]
        if missing_cols:
            self.issues.append(Issue("BAD_HEADER", f"missing column(s) {missing_cols}", source=src))
            return {}
        out: dict = {}
        given_unit = self.unit_overrides.get(fname)
        for lineno, row in enumerate(rows, start=2):
            where = tuple(row[c] for c in index)
            parts = [self._parse_index(c, row[c], where, f"{src}:{lineno}") for c in index]
            if any(p is None for p in parts):
                continue
            try:
                value = float(row["value"])
            except ValueError:
                self.issues.append(Issue("BAD_VALUE", f"value {row['value']!r} is not a number", where,
                                         f"{src}:{lineno}"))
                continue
            for key in itertools.product(*parts):
                expected = unit(key) if callable(unit) else unit
                try:
                    factor = conversion_factor(given_unit or row["unit"], expected)
                except UnitError as exc:
                    self.issues.append(Issue("UNIT_MISMATCH", str(exc), key, f"{src}:{lineno}"))
                    break
                v = value * factor
                if not allow_negative and v < 0:
                    self.issues.append(Issue("NEGATIVE_VALUE", f"value {value} must be nonnegative", key,
                                             f"{src}:{lineno}"))
                    break
                if bounds is not None and not bounds[0] <= v <= bounds[1]:
                    self.issues.append(Issue("OUT_OF_RANGE", f"value {value} outside {bounds}", key,
                                             f"{src}:{lineno}"))
                    break
                out[key[0] if len(index) == 1 else key] = v
        return out


def _hourly_index(first: str) -> tuple[str, ...]:
    return (first, "node", "period", "scenario", "hour")


def _hour_keyed(table: dict) -> dict:
    """Reorder file keys ``(q, n, i, w, h)`` to the model's ``(q, n, h, i, w)``."""
    return {(q, n, h, i, w): v for (q, n, i, w, h), v in table.items()}


def load_parameters(data_dir, dims: ModelDimensions, tables: ScenarioTables | None = None,
                    discount_sign: int = -1, unit_overrides: dict[str, str] | None = None) -> ParameterStore:
    """Load every parameter file of ``data_dir`` and check completeness.

    Hourly availability/demand and hydro budgets come from ``tables`` when
    given (scenario sampling), otherwise from ``availability.csv``,
    ``demand.csv`` and ``hydro_budget.csv``.  ``unit_overrides`` maps a file
    name to a unit that replaces the unit cell of all its rows.  Raises
    :class:`DataError` listing every issue found.
    """
    d = Path(data_dir)
    issues: list[Issue] = []
    rd = _Reader(d, dims, issues, unit_overrides)
    periods = dims.periods
    L = dims.period_length
    techs = [t.name for t in dims.technologies]

    scalars = rd.read("scalars.csv", ("name",), lambda k: "1", required=True, allow_negative=True)
    discount_rate = scalars.get("discount_rate")
    if discount_rate is None:
        issues.append(Issue("MISSING_PARAMETER", "discount_rate not given", ("discount_rate",), "scalars.csv"))
        discount_rate = 0.0
    elif discount_rate <= -1:
        issues.append(Issue("OUT_OF_RANGE", "discount rate must exceed -1", ("discount_rate",), "scalars.csv"))

    raw_life = _read_lifetimes(rd, L)
    invest = rd.read("invest_cost.csv", ("technology", "period"),
                     lambda k: f"EUR/({capacity_unit(dims, k[0])})", required=True)
    opc = rd.read("op_cost.csv", ("technology", "period"),
                  lambda k: f"EUR/{output_unit(dims, k[0])}")
    shed = rd.read("shed_cost.csv", ("commodity", "node", "period"),
                   lambda k: f"EUR/{amount_unit(k[0])}")
    init_cap = rd.read("initial_capacity.csv", ("technology", "node", "period"),
                       lambda k: capacity_unit(dims, k[0]))
    init_tr_raw = rd.read("initial_transmission.csv", ("technology", "from_node", "to_node", "period"),
                          lambda k: capacity_unit(dims, k[0]))
    emis = rd.read("emission_intensity.csv", ("technology",),
                   lambda k: f"tCO2/{output_unit(dims, k[0])}")
    cap = rd.read("emission_cap.csv", ("period",), "tCO2")
    limit = rd.read("resource_limit.csv", ("commodity", "node"), lambda k: amount_unit(k[0]))
    elec = rd.read("electrolyzer_power.csv", ("technology",), "MWh/ton")
    max_build = rd.read("max_build.csv", ("technology", "node", "period"),
                        lambda k: capacity_unit(dims, k[0]))
    fixed = rd.read("fixed_hydrogen.csv", ("period",), "ton/yr")
    fuel_rows = _read_fuel(rd, dims)

    pos = {n: k for k, n in enumerate(dims.nodes)}
    init_tr = {}
    for (t, n, m, i), v in init_tr_raw.items():
        a, b = (n, m) if pos[n] <= pos[m] else (m, n)
        init_tr[(t, a, b, i)] = v

    if tables is None:
        tables = ScenarioTables(
            availability=_hour_keyed(rd.read("availability.csv", _hourly_index("technology"), "fraction",
                                             bounds=(0.0, 1.0))),
            demand=_hour_keyed(rd.read("demand.csv", _hourly_index("commodity"), lambda k: rate_unit(k[0]))),
            hydro_budget=rd.read("hydro_budget.csv", ("technology", "node", "season", "period", "scenario"),
                                 "MWh"),
        )
    else:
        # non-power demand may still come from file
        extra = _hour_keyed(rd.read("demand.csv", _hourly_index("commodity"), lambda k: rate_unit(k[0])))
        dem = {k: v for k, v in extra.items() if k[0] != POWER}
        dem.update(tables.demand)
        tables = ScenarioTables(tables.availability, dem, tables.hydro_budget)
        for key, a in tables.availability.items():
            if not 0.0 <= a <= 1.0:
                issues.append(Issue("OUT_OF_RANGE", f"availability {a} outside [0, 1]", key, "scenarios"))

    # -- completeness ------------------------------------------------------
    def need(store: dict, key, what: str, src: str):
        if key not in store:
            issues.append(Issue("MISSING_PARAMETER", f"{what} missing", key, src))

    for t in techs:
        need(raw_life, t, "lifetime", "lifetime.csv")
        for i in periods:
            if investable(dims, t):
                need(invest, (t, i), "investment cost", "invest_cost.csv")
    for e in dims.electrolyzers:
        need(elec, e, "electrolyzer power use", "electrolyzer_power.csv")
        if e in elec and elec[e] <= 0:
            issues.append(Issue("OUT_OF_RANGE", "electrolyzer power use must be positive", (e,),
                                "electrolyzer_power.csv"))
    for t in dims.production():
        for i in periods:
            need(opc, (t, i), "operational cost", "op_cost.csv")
    vres_series = [g for g in dims.vres if not dims.tech[g].reservoir]
    for n in dims.nodes:
        for g in vres_series:
            if not dims.has_tech(n, g):
                continue
            for i in periods:
                for w in dims.scenarios:
                    for h in dims.hours:
                        need(tables.availability, (g, n, h, i, w), "availability", "availability")
        if POWER in dims.commodities:
            for i in periods:
                for w in dims.scenarios:
                    for h in dims.hours:
                        need(tables.demand, (POWER, n, h, i, w), "power demand", "demand")
        for g in dims.generators:
            if dims.tech[g].reservoir and dims.has_tech(n, g):
                for s in dims.seasons:
                    for i in periods:
                        for w in dims.scenarios:
                            need(tables.hydro_budget, (g, n, s.name, i, w), "hydro energy budget", "hydro")
    if fixed:
        for i in periods:
            need(fixed, i, "fixed hydrogen production", "fixed_hydrogen.csv")

    h2_pipes = dims.transmission(H2)
    ng_pipes = dims.transmission(NG)
    if h2_pipes and ng_pipes and dims.undirected_arcs(NG):
        for name in ("repurpose_cost_factor", "repurpose_flow_factor"):
            need(scalars, name, name, "scalars.csv")

    if issues:
        raise DataError(issues)

    return ParameterStore(
        discount_rate=float(discount_rate),
        lifetime=raw_life,
        invest_cost=invest,
        op_cost=opc,
        shed_cost=shed,
        initial_capacity=init_cap,
        initial_transmission=init_tr,
        emission_intensity=emis,
        emission_cap=cap,
        resource_limit=limit,
        electrolyzer_power=elec,
        fuel_use=fuel_rows,
        max_build=max_build,
        fixed_h2=fixed,
        repurpose_cost_factor=float(scalars.get("repurpose_cost_factor", 0.0)),
        repurpose_flow_factor=float(scalars.get("repurpose_flow_factor", 0.0)),
        discount_sign=discount_sign,
        availability=dict(tables.availability),
        demand=dict(tables.demand),
        hydro_budget=dict(tables.hydro_budget),
    )


def _read_lifetimes(rd: _Reader, L: int) -> dict:
    path = rd.dir / "lifetime.csv"
    if not path.exists():
        rd.issues.append(Issue("MISSING_FILE", f"required file not found: {path}", source=str(path)))
        return {}
    header, rows = read_csv_rows(path)
    if any(c not in header for c in ("technology", "value", "unit")):
        rd.issues.append(Issue("BAD_HEADER", "lifetime.csv needs technology,value,unit", source=str(path)))
        return {}
    out = {}
    for lineno, row in enumerate(rows, start=2):
        t, unit = row["technology"], row["unit"]
        src = f"{path}:{lineno}"
        if t not in rd.dims.tech:
            rd.issues.append(Issue("UNKNOWN_INDEX", f"technology {t!r} is not declared", (t,), src))
            continue
        try:
            value = float(row["value"])
        except ValueError:
            rd.issues.append(Issue("BAD_VALUE", f"value {row['value']!r} is not a number", (t,), src))
            continue
        if value < 0:
            rd.issues.append(Issue("NEGATIVE_VALUE", "lifetime must be nonnegative", (t,), src))
            continue
        if unit == "periods":
            out[t] = int(round(value))
        elif unit in ("years", "yr", "year"):
            out[t] = int(value // L)
        else:
            rd.issues.append(Issue("UNIT_MISMATCH", f"lifetime unit {unit!r} must be periods or years", (t,), src))
            continue
        if out[t] < 1:
            rd.issues.append(Issue("OUT_OF_RANGE", "lifetime must cover at least one period", (t,), src))
    return out


def _read_fuel(rd: _Reader, dims: ModelDimensions) -> dict:
    """``fuel.csv``: technology,commodity,value,unit -- input commodity used per output unit."""
    path = rd.dir / "fuel.csv"
    if not path.exists():
        return {}
    header, rows = read_csv_rows(path)
    if any(c not in header for c in ("technology", "commodity", "value", "unit")):
        rd.issues.append(Issue("BAD_HEADER", "fuel.csv needs technology,commodity,value,unit", source=str(path)))
        return {}
    out = {}
    for lineno, row in enumerate(rows, start=2):
        t, c = row["technology"], row["commodity"]
        src = f"{path}:{lineno}"
        if t not in dims.tech or dims.tech[t].kind != PRODUCTION:
            rd.issues.append(Issue("UNKNOWN_INDEX", f"production technology {t!r} is not declared", (t, c), src))
            continue
        if c not in dims.commodities:
            rd.issues.append(Issue("UNKNOWN_INDEX", f"commodity {c!r} is not declared", (t, c), src))
            continue
        expected = f"{amount_unit(c)}/{output_unit(dims, t)}"
        try:
            v = float(row["value"]) * conversion_factor(row["unit"], expected)
        except UnitError as exc:
            rd.issues.append(Issue("UNIT_MISMATCH", str(exc), (t, c), src))
            continue
        except ValueError:
            rd.issues.append(Issue("BAD_VALUE", f"value {row['value']!r} is not a number", (t, c), src))
            continue
        if v < 0:
            rd.issues.append(Issue("NEGATIVE_VALUE", "fuel use must be nonnegative", (t, c), src))
            continue
        out[t] = (c, v)
    return out

