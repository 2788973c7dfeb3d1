"""Sampling of representative operational windows from historical hourly series.

Each scenario draws, for every season, one window uniformly from the
season's pool of candidate start hours.  Draws use SplitMix64 in counter
mode so that a seed fixes the result independently of platform or language:

    out(k) = mix(seed + (k + 1) * 0x9E3779B97F4A7C15 mod 2**64)
    mix(z):  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
             z = (z ^ (z >> 27)) * 0x94D049BB133111EB
             z =  z ^ (z >> 31)                        (all mod 2**64)

``k`` counts every 64-bit output consumed.  A uniform integer below ``n`` is
drawn by rejection: outputs ``>= 2**64 - (2**64 mod n)`` are discarded and
the next counter value is used; otherwise the result is ``out mod n``.
Draws are made scenario-major, then in season order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dimensions import HOURS_PER_YEAR, POWER, ModelDimensions, read_csv_rows
from .errors import DataError, Issue
from .parameters import ScenarioTables
from .units import UnitError, conversion_factor

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1
LOAD = "load"


def splitmix64_mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    """Counter-based SplitMix64 stream."""

    def __init__(self, seed: int):
        self.seed = seed & _MASK
        self.counter = 0

    def next_u64(self) -> int:
        self.counter += 1
        return splitmix64_mix((self.seed + self.counter * GOLDEN_GAMMA) & _MASK)

    def below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % n


@dataclass(frozen=True)
class SeasonPool:
    """A season to sample: window length and the day-of-year ranges it may come from."""

    name: str
    hours: int
    day_ranges: tuple[tuple[int, int], ...] = ((0, 365),)


@dataclass
class HistoricalSeries:
    """Hourly vectors keyed by ``(quantity, node)``; quantity is ``load`` or a technology."""

    data: dict[tuple[str, str], np.ndarray] = field(default_factory=dict)

    @property
    def length(self) -> int:
        lengths = {len(v) for v in self.data.values()}
        if len(lengths) > 1:
            raise DataError([Issue("SERIES_LENGTH", f"series lengths differ: {sorted(lengths)}")])
        return lengths.pop() if lengths else 0

    def validate(self, availability_quantities=()) -> list[Issue]:
        out = []
        by_node: dict[str, set[int]] = {}
        for (q, n), v in self.data.items():
            by_node.setdefault(n, set()).add(len(v))
            if len(v) < HOURS_PER_YEAR:
                out.append(Issue("SERIES_TOO_SHORT", "series must span at least one year", (q, n)))
            if q in availability_quantities and (np.any(v < 0) or np.any(v > 1)):
                out.append(Issue("OUT_OF_RANGE", "availability outside [0, 1]", (q, n)))
        for n, lens in by_node.items():
            if len(lens) > 1:
                out.append(Issue("SERIES_LENGTH", "series of one node differ in length", (n,)))
        return out


@dataclass(frozen=True)
class Window:
    year: int
    start_hour: int        # hour of year, multiple of 24

    @property
    def offset(self) -> int:
        return self.year * HOURS_PER_YEAR + self.start_hour


@dataclass
class ScenarioSet:
    scenarios: tuple[str, ...]
    probabilities: tuple[float, ...]
    seasons: tuple[SeasonPool, ...]
    windows: dict[tuple[str, str], Window]
    slices: dict[tuple[str, str, str, str], np.ndarray]   # (quantity, node, scenario, season)
    seed: int

    def to_json(self) -> str:
        payload = {
            "seed": self.seed,
            "scenarios": list(self.scenarios),
            "probabilities": [repr(p) for p in self.probabilities],
            "seasons": [{"name": s.name, "hours": s.hours, "day_ranges": [list(r) for r in s.day_ranges]}
                        for s in self.seasons],
            "windows": [{"scenario": w, "season": s, "year": win.year, "start_hour": win.start_hour}
                        for (w, s), win in self.windows.items()],
            "slices": [{"quantity": q, "node": n, "scenario": w, "season": s,
                        "values": [repr(float(x)) for x in v]}
                       for (q, n, w, s), v in self.slices.items()],
        }
        return json.dumps(payload, sort_keys=False, separators=(",", ":"))


def season_pool(season: SeasonPool, n_years: int) -> list[Window]:
    """Every day-aligned window of the season that fits inside one day range."""
    out = []
    for y in range(n_years):
        for d0, d1 in season.day_ranges:
            last_start = d1 * 24 - season.hours
            for start in range(d0 * 24, last_start + 1, 24):
                out.append(Window(y, start))
    return out


def sample_scenarios(series: HistoricalSeries, n_scenarios: int, seasons, seed: int) -> ScenarioSet:
    if n_scenarios < 1:
        raise ValueError("n_scenarios must be at least 1")
    seasons = tuple(seasons)
    n_years = series.length // HOURS_PER_YEAR
    pools = {}
    for s in seasons:
        pool = season_pool(s, n_years)
        if not pool:
            raise DataError([Issue("POOL_TOO_SMALL", f"season {s.name!r} has no complete window", (s.name,))])
        pools[s.name] = pool
    rng = SplitMix64(seed)
    names = tuple(f"S{k + 1}" for k in range(n_scenarios))
    windows: dict[tuple[str, str], Window] = {}
    for w in names:
        for s in seasons:
            pool = pools[s.name]
            windows[(w, s.name)] = pool[rng.below(len(pool))]
    slices = {}
    for (q, n), vec in series.data.items():
        for w in names:
            for s in seasons:
                off = windows[(w, s.name)].offset
                slices[(q, n, w, s.name)] = np.asarray(vec[off:off + s.hours], dtype=float).copy()
    probs = tuple(1.0 / n_scenarios for _ in names)
    return ScenarioSet(names, probs, seasons, windows, slices, seed)


def flatten_to_parameters(scen: ScenarioSet, dims: ModelDimensions) -> ScenarioTables:
    """Expand sampled windows to hourly availability, power demand and hydro budgets.

    Every period reuses the same sampled weather, so values are identical
    across periods.  Reservoir technologies get the window's summed inflow as
    a seasonal energy budget.
    """
    issues = []
    if scen.scenarios != dims.scenarios:
        issues.append(Issue("DIMENSION_MISMATCH",
                            f"scenario set {scen.scenarios} does not match model scenarios {dims.scenarios}"))
    dseasons = [(s.name, len(s.hours)) for s in dims.seasons]
    sseasons = [(s.name, s.hours) for s in scen.seasons]
    if dseasons != sseasons:
        issues.append(Issue("DIMENSION_MISMATCH", f"seasons {sseasons} do not match model seasons {dseasons}"))
    if issues:
        raise DataError(issues)

    availability: dict = {}
    demand: dict = {}
    budget: dict = {}
    for (q, n, w, sname), vec in scen.slices.items():
        season = next(s for s in dims.seasons if s.name == sname)
        if q == LOAD:
            if POWER not in dims.commodities:
                continue
            for k, h in enumerate(season.hours):
                for i in dims.periods:
                    demand[(POWER, n, h, i, w)] = float(vec[k])
            continue
        t = dims.tech.get(q)
        if t is None or not dims.has_tech(n, q):
            continue
        if t.reservoir:
            total = float(np.sum(vec))
            for i in dims.periods:
                budget[(q, n, sname, i, w)] = total
        elif t.vres:
            for k, h in enumerate(season.hours):
                for i in dims.periods:
                    availability[(q, n, h, i, w)] = float(vec[k])
    return ScenarioTables(availability, demand, budget)


def series_unit(quantity: str, dims: ModelDimensions | None) -> str:
    """Internal unit of a series: MW for load and reservoir inflow, a fraction otherwise."""
    if quantity == LOAD:
        return "MW"
    if dims is not None and quantity in dims.tech and dims.tech[quantity].reservoir:
        return "MW"
    return "fraction"


def load_series(series_dir, dims: ModelDimensions | None = None) -> HistoricalSeries:
    """Read ``<series_dir>/<quantity>/<node>.csv`` files (columns ``hour,value,unit``)."""
    root = Path(series_dir)
    if not root.is_dir():
        raise DataError([Issue("MISSING_FILE", f"series directory not found: {root}", source=str(root))])
    data = {}
    issues = []
    for qdir in sorted(p for p in root.iterdir() if p.is_dir()):
        for f in sorted(qdir.glob("*.csv")):
            header, rows = read_csv_rows(f)
            if "value" not in header or "unit" not in header:
                issues.append(Issue("BAD_HEADER", "series file needs value and unit columns", source=str(f)))
                continue
            units = {r["unit"] for r in rows}
            if len(units) > 1:
                issues.append(Issue("UNIT_MISMATCH", f"mixed units {sorted(units)}", source=str(f)))
                continue
            factor = 1.0
            if units:
                try:
                    factor = conversion_factor(units.pop(), series_unit(qdir.name, dims))
                except UnitError as exc:
                    issues.append(Issue("UNIT_MISMATCH", str(exc), (qdir.name, f.stem), str(f)))
                    continue
            try:
                data[(qdir.name, f.stem)] = np.array([float(r["value"]) for r in rows]) * factor
            except ValueError as exc:
                issues.append(Issue("BAD_VALUE", str(exc), (qdir.name, f.stem), str(f)))
    if issues:
        raise DataError(issues)
    return HistoricalSeries(data)
