"""Index sets of the expansion model and their validation.

Hours are numbered globally ``0..|H|-1`` with every season a contiguous
block, so the first and last hour of each season follow from the season
lengths.  Periods are numbered from 1.
"""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

from .errors import DataError, Issue

POWER, H2, NG, CO2 = "Power", "H2", "NG", "CO2"
PRODUCTION, STORAGE, TRANSMISSION = "production", "storage", "transmission"
KINDS = (PRODUCTION, STORAGE, TRANSMISSION)
HOURS_PER_YEAR = 8760


@dataclass(frozen=True)
class Technology:
    name: str
    kind: str
    commodity: str
    vres: bool = False
    electrolyzer: bool = False
    reservoir: bool = False


@dataclass(frozen=True)
class Season:
    name: str
    hours: tuple[int, ...]
    represents_hours: float = HOURS_PER_YEAR

    @property
    def scale(self) -> float:
        """Annualisation multiplier: year hours represented per modelled hour."""
        return self.represents_hours / len(self.hours)


@dataclass(frozen=True)
class ModelDimensions:
    nodes: tuple[str, ...]
    periods: tuple[int, ...]
    period_length: int
    seasons: tuple[Season, ...]
    scenarios: tuple[str, ...]
    probabilities: tuple[float, ...]
    commodities: tuple[str, ...]
    technologies: tuple[Technology, ...]
    # (node, technology) pairs where a production/storage technology may exist
    node_technologies: tuple[tuple[str, str], ...]
    # directed (commodity, from, to); must be symmetric
    arcs: tuple[tuple[str, str, str], ...]
    # (node, period) pairs of the 90 % renewable-grid exemption table
    exempt: tuple[tuple[str, int], ...] = ()
    start_year: int = 2024
    period_labels: tuple[str, ...] = field(default=())

    # -- derived lookups -------------------------------------------------
    @cached_property
    def hours(self) -> tuple[int, ...]:
        return tuple(h for s in self.seasons for h in s.hours)

    @cached_property
    def first_hours(self) -> frozenset[int]:
        return frozenset(s.hours[0] for s in self.seasons if s.hours)

    @cached_property
    def last_hours(self) -> frozenset[int]:
        return frozenset(s.hours[-1] for s in self.seasons if s.hours)

    @cached_property
    def season_of_hour(self) -> dict[int, Season]:
        return {h: s for s in self.seasons for h in s.hours}

    @cached_property
    def tech(self) -> dict[str, Technology]:
        return {t.name: t for t in self.technologies}

    def _of_kind(self, kind: str, commodity: str | None) -> tuple[str, ...]:
        return tuple(t.name for t in self.technologies
                     if t.kind == kind and (commodity is None or t.commodity == commodity))

    def production(self, commodity: str | None = None) -> tuple[str, ...]:
        return self._of_kind(PRODUCTION, commodity)

    def storage(self, commodity: str | None = None) -> tuple[str, ...]:
        return self._of_kind(STORAGE, commodity)

    def transmission(self, commodity: str | None = None) -> tuple[str, ...]:
        return self._of_kind(TRANSMISSION, commodity)

    @cached_property
    def generators(self) -> tuple[str, ...]:
        return self.production(POWER)

    @cached_property
    def vres(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.technologies if t.vres)

    @cached_property
    def electrolyzers(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.technologies if t.electrolyzer)

    @cached_property
    def _node_techs(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = defaultdict(list)
        allowed = set(self.node_technologies)
        for n in self.nodes:
            for t in self.technologies:
                if (n, t.name) in allowed:
                    out[n].append(t.name)
        return {n: tuple(v) for n, v in out.items()}

    def techs_at(self, node: str) -> tuple[str, ...]:
        return self._node_techs.get(node, ())

    def has_tech(self, node: str, tech: str) -> bool:
        return tech in self.techs_at(node)

    def neighbors(self, commodity: str, node: str) -> tuple[str, ...]:
        return tuple(m for c, n, m in self.arcs if c == commodity and n == node)

    def undirected_arcs(self, commodity: str) -> tuple[tuple[str, str], ...]:
        """Each bidirectional arc once, endpoints ordered by node order."""
        pos = {n: k for k, n in enumerate(self.nodes)}
        seen: list[tuple[str, str]] = []
        for c, n, m in self.arcs:
            if c != commodity:
                continue
            pair = (n, m) if pos.get(n, 0) <= pos.get(m, 0) else (m, n)
            if pair not in seen:
                seen.append(pair)
        return tuple(seen)

    def exempt_nodes(self, period: int) -> tuple[str, ...]:
        ex = {n for n, i in self.exempt if i == period}
        return tuple(n for n in self.nodes if n in ex)

    def probability(self, scenario: str) -> float:
        return self.probabilities[self.scenarios.index(scenario)]

    def period_label(self, period: int) -> str:
        if self.period_labels:
            return self.period_labels[period - 1]
        y0 = self.start_year + self.period_length * (period - 1)
        return f"{y0}-{y0 + self.period_length}"

    @property
    def represented_hours(self) -> float:
        return sum(s.represents_hours for s in self.seasons)

    # -- (de)serialisation ---------------------------------------------
    def to_dict(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "periods": list(self.periods),
            "period_length": self.period_length,
            "seasons": [{"name": s.name, "hours": list(s.hours), "represents_hours": s.represents_hours}
                        for s in self.seasons],
            "scenarios": list(self.scenarios),
            "probabilities": list(self.probabilities),
            "commodities": list(self.commodities),
            "technologies": [vars(t).copy() for t in self.technologies],
            "node_technologies": [list(p) for p in self.node_technologies],
            "arcs": [list(a) for a in self.arcs],
            "exempt": [list(e) for e in self.exempt],
            "start_year": self.start_year,
            "period_labels": list(self.period_labels),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelDimensions":
        return cls(
            nodes=tuple(d["nodes"]),
            periods=tuple(int(i) for i in d["periods"]),
            period_length=int(d["period_length"]),
            seasons=tuple(Season(s["name"], tuple(s["hours"]), float(s["represents_hours"]))
                          for s in d["seasons"]),
            scenarios=tuple(d["scenarios"]),
            probabilities=tuple(float(p) for p in d["probabilities"]),
            commodities=tuple(d["commodities"]),
            technologies=tuple(Technology(**t) for t in d["technologies"]),
            node_technologies=tuple(tuple(p) for p in d["node_technologies"]),
            arcs=tuple(tuple(a) for a in d["arcs"]),
            exempt=tuple((n, int(i)) for n, i in d["exempt"]),
            start_year=int(d.get("start_year", 2024)),
            period_labels=tuple(d.get("period_labels", ())),
        )


def validate_dimensions(dims: ModelDimensions) -> list[Issue]:
    """Every invariant violation of ``dims``; an empty list means valid."""
    out: list[Issue] = []

    def bad(code, msg, *where):
        out.append(Issue(code, msg, tuple(where)))

    for label, seq in (("node", dims.nodes), ("scenario", dims.scenarios),
                       ("commodity", dims.commodities), ("period", dims.periods),
                       ("season", [s.name for s in dims.seasons]),
                       ("technology", [t.name for t in dims.technologies])):
        dup = sorted({x for x in seq if list(seq).count(x) > 1}, key=str)
        for x in dup:
            bad("DUPLICATE_ID", f"{label} {x!r} defined more than once", x)

    if dims.periods != tuple(range(1, len(dims.periods) + 1)):
        bad("PERIOD_NUMBERING", "periods must be numbered 1..|I|")
    if dims.period_length < 1:
        bad("PERIOD_LENGTH", f"period length {dims.period_length} < 1")
    if dims.period_labels and len(dims.period_labels) != len(dims.periods):
        bad("PERIOD_LABELS", "one label per period required")

    if len(dims.probabilities) != len(dims.scenarios):
        bad("PROB_COUNT", "one probability per scenario required")
    if any(p <= 0 for p in dims.probabilities):
        for w, p in zip(dims.scenarios, dims.probabilities):
            if p <= 0:
                bad("PROB_NONPOSITIVE", f"probability {p} is not positive", w)
    total = math.fsum(dims.probabilities)
    if not dims.scenarios or abs(total - 1.0) > 1e-9:
        bad("PROB_SUM", f"scenario probabilities sum to {total:.12g}, not 1")

    # hours: seasons are contiguous blocks covering 0..|H|-1 exactly once
    expected = 0
    for s in dims.seasons:
        if not s.hours:
            bad("SEASON_EMPTY", "season has no hours", s.name)
            continue
        if s.hours != tuple(range(expected, expected + len(s.hours))):
            bad("HOUR_PARTITION", "season hours must continue the global numbering contiguously", s.name)
        expected = max(expected, max(s.hours) + 1)
        if s.represents_hours <= 0:
            bad("SEASON_SCALE", "represented hours must be positive", s.name)
    if not dims.seasons:
        bad("SEASON_EMPTY", "at least one season required")
    all_hours = [h for s in dims.seasons for h in s.hours]
    if len(all_hours) != len(set(all_hours)):
        bad("HOUR_PARTITION", "an hour belongs to more than one season")

    comms = set(dims.commodities)
    nodes = set(dims.nodes)
    for t in dims.technologies:
        if t.kind not in KINDS:
            bad("UNKNOWN_KIND", f"technology kind {t.kind!r}", t.name)
        if t.commodity not in comms:
            bad("UNKNOWN_COMMODITY", f"commodity {t.commodity!r} not declared", t.name)
        if t.vres and not (t.kind == PRODUCTION and t.commodity == POWER):
            bad("VRES_NOT_GENERATOR", "VRES technologies must be power producers", t.name)
        if t.reservoir and not (t.kind == PRODUCTION and t.commodity == POWER):
            bad("RESERVOIR_NOT_GENERATOR", "reservoirs must be power producers", t.name)
        if t.electrolyzer and not (t.kind == PRODUCTION and t.commodity == H2):
            bad("ELECTROLYZER_NOT_H2", "electrolyzers must produce H2", t.name)

    for n, t in dims.node_technologies:
        if n not in nodes:
            bad("UNKNOWN_NODE", f"node {n!r} not declared", n, t)
        if t not in dims.tech:
            bad("UNKNOWN_TECHNOLOGY", f"technology {t!r} not declared", n, t)
        elif dims.tech[t].kind == TRANSMISSION:
            bad("TRANSMISSION_AT_NODE", "transmission types live on arcs, not nodes", n, t)

    arcset = set(dims.arcs)
    for c, n, m in dims.arcs:
        if c not in comms:
            bad("UNKNOWN_COMMODITY", f"commodity {c!r} not declared", c, n, m)
        if n not in nodes or m not in nodes:
            bad("UNKNOWN_NODE", "arc endpoint not declared", c, n, m)
        if n == m:
            bad("ARC_SELF_LOOP", "arc connects a node to itself", c, n, m)
        if (c, m, n) not in arcset:
            bad("ARC_ASYMMETRY", f"arc {n}->{m} has no reverse {m}->{n}", c, n, m)
    if len(arcset) != len(dims.arcs):
        bad("DUPLICATE_ID", "arc listed more than once")

    periods = set(dims.periods)
    for n, i in dims.exempt:
        if n not in nodes:
            bad("UNKNOWN_NODE", f"exempt node {n!r} not declared", n, i)
        if i not in periods:
            bad("UNKNOWN_PERIOD", f"exempt period {i!r} not declared", n, i)
    return out


# -- loading from a data directory -------------------------------------------

def read_csv_rows(path: Path) -> tuple[list[str], list[dict[str, str]]]:
    if not path.exists():
        raise DataError([Issue("MISSING_FILE", f"required file not found: {path}", source=str(path))])
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = [h.strip() for h in (reader.fieldnames or [])]
        reader.fieldnames = header
        rows = [{k: (v or "").strip() for k, v in row.items() if k is not None} for row in reader]
    return header, rows


def _require_columns(path: Path, header: list[str], cols: tuple[str, ...]) -> None:
    missing = [c for c in cols if c not in header]
    if missing:
        raise DataError([Issue("BAD_HEADER", f"missing column(s) {missing}", source=str(path))])


def _flag(value: str) -> bool:
    return value.strip().lower() in ("1", "true", "yes", "y", "x")


def load_dimensions(data_dir, seasons: tuple[Season, ...], n_periods: int, period_length: int,
                    scenarios: tuple[str, ...], probabilities: tuple[float, ...] | None = None,
                    start_year: int = 2024) -> ModelDimensions:
    """Read the topology files of ``data_dir`` and combine them with the time structure."""
    d = Path(data_dir)
    _, nrows = read_csv_rows(d / "nodes.csv")
    nodes = tuple(r["node"] for r in nrows)
    _, crows = read_csv_rows(d / "commodities.csv")
    commodities = tuple(r["commodity"] for r in crows)

    path = d / "technologies.csv"
    header, trows = read_csv_rows(path)
    _require_columns(path, header, ("technology", "kind", "commodity"))
    techs = tuple(Technology(r["technology"], r["kind"], r["commodity"],
                             vres=_flag(r.get("vres", "")),
                             electrolyzer=_flag(r.get("electrolyzer", "")),
                             reservoir=_flag(r.get("reservoir", "")))
                  for r in trows)

    path = d / "node_technologies.csv"
    header, ntrows = read_csv_rows(path)
    _require_columns(path, header, ("node", "technology"))
    node_techs = tuple((r["node"], r["technology"]) for r in ntrows)

    path = d / "arcs.csv"
    header, arows = read_csv_rows(path)
    _require_columns(path, header, ("commodity", "from_node", "to_node"))
    arcs = tuple((r["commodity"], r["from_node"], r["to_node"]) for r in arows)

    exempt: tuple[tuple[str, int], ...] = ()
    epath = d / "exempt_nodes.csv"
    if epath.exists():
        header, erows = read_csv_rows(epath)
        _require_columns(epath, header, ("node", "period"))
        issues = []
        ex = []
        for r in erows:
            try:
                ex.append((r["node"], int(r["period"])))
            except ValueError:
                issues.append(Issue("BAD_VALUE", f"period {r['period']!r} is not an integer",
                                    (r["node"], r["period"]), str(epath)))
        if issues:
            raise DataError(issues)
        exempt = tuple(ex)

    if probabilities is None:
        probabilities = tuple(1.0 / len(scenarios) for _ in scenarios)
    return ModelDimensions(
        nodes=nodes, periods=tuple(range(1, n_periods + 1)), period_length=period_length,
        seasons=seasons, scenarios=tuple(scenarios), probabilities=tuple(probabilities),
        commodities=commodities, technologies=techs, node_technologies=node_techs,
        arcs=arcs, exempt=exempt, start_year=start_year,
    )


def make_seasons(spec: list[tuple[str, int, float]]) -> tuple[Season, ...]:
    """Build contiguous seasons from ``(name, n_hours, represents_hours)`` triples."""
    out = []
    h0 = 0
    for name, n_hours, represents in spec:
        out.append(Season(name, tuple(range(h0, h0 + n_hours)), float(represents)))
        h0 += n_hours
    return tuple(out)
