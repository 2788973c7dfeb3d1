"""Run manifests: one YAML file with ``time``, ``scenarios``, ``cases``, ``solver``, ``model`` and ``io``.

Grammar (all paths relative to the manifest file)::

    data: toy                     # data directory
    time:
      periods: 2                  # number of investment periods
      period_length: 3            # years per period
      start_year: 2024            # optional
      seasons:                    # contiguous blocks of modeled hours
        - {name: day, hours: 24, represents: 8760, days: [[0, 365]]}
    scenarios:
      count: 2
      seed: 42
      series: series              # under the data directory; omit to read hourly CSVs instead
      probabilities: [0.5, 0.5]   # optional, uniform by default
    cases:                        # preset names or custom flag sets
      - Base
      - {name: mine, additionality: true, temporal: true, custom: true}
    solver:
      kind: embedded              # embedded | external-mps | highs
      command: null               # external-mps: argv receiving <model.mps> <solution.sol>
      export_mps: false
    model:
      discount_sign: -1           # +1 reads the discount exponent literally
      repurposing: true
    units: {}                     # file name -> unit replacing that file's unit column
    io:
      out: out
"""

from __future__ import annotations

import shlex
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from .dimensions import HOURS_PER_YEAR, Season, make_seasons
from .model import CaseConfig, CaseError
from .scenarios import SeasonPool

SOLVERS = ("embedded", "external-mps", "highs")


class ManifestError(Exception):
    code = "BAD_MANIFEST"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code:
            self.code = code


@dataclass(frozen=True)
class SeasonSpec:
    name: str
    hours: int
    represents: float = HOURS_PER_YEAR
    days: tuple[tuple[int, int], ...] = ((0, 365),)


@dataclass(frozen=True)
class RunManifest:
    path: Path
    data_dir: Path
    periods: int
    period_length: int
    seasons: tuple[SeasonSpec, ...]
    scenario_count: int
    seed: int
    series_dir: Path | None
    cases: tuple[CaseConfig, ...]
    solver: str = "embedded"
    solver_command: tuple[str, ...] | None = None
    export_mps: bool = False
    out_dir: Path = Path("out")
    discount_sign: int = -1
    repurposing: bool = True
    start_year: int = 2024
    probabilities: tuple[float, ...] | None = None
    unit_overrides: dict = field(default_factory=dict)

    @property
    def scenario_names(self) -> tuple[str, ...]:
        return tuple(f"S{k + 1}" for k in range(self.scenario_count))

    def model_seasons(self) -> tuple[Season, ...]:
        return make_seasons([(s.name, s.hours, s.represents) for s in self.seasons])

    def season_pools(self) -> tuple[SeasonPool, ...]:
        return tuple(SeasonPool(s.name, s.hours, s.days) for s in self.seasons)

    def with_overrides(self, out: str | None = None, seed: int | None = None, cases: str | None = None,
                       solver: str | None = None) -> "RunManifest":
        m = self
        if out is not None:
            m = replace(m, out_dir=Path(out))
        if seed is not None:
            m = replace(m, seed=int(seed))
        if cases is not None:
            m = replace(m, cases=tuple(_case(c) for c in cases.split(",") if c.strip()))
        if solver is not None:
            if solver not in SOLVERS:
                raise ManifestError(f"unknown solver {solver!r}; choose from {', '.join(SOLVERS)}")
            m = replace(m, solver=solver)
        return m

    def describe(self) -> dict:
        """Path-free description used in run summaries."""
        return {
            "periods": self.periods,
            "period_length": self.period_length,
            "seasons": [{"name": s.name, "hours": s.hours, "represents": s.represents,
                         "days": [list(d) for d in s.days]} for s in self.seasons],
            "scenarios": self.scenario_count,
            "seed": self.seed,
            "cases": [c.name for c in self.cases],
            "solver": self.solver,
            "discount_sign": self.discount_sign,
            "repurposing": self.repurposing,
        }


def _case(entry) -> CaseConfig:
    try:
        if isinstance(entry, str):
            return CaseConfig.preset(entry.strip())
        if isinstance(entry, dict):
            flags = {k: bool(entry.get(k, False)) for k in ("additionality", "spatial", "temporal", "exemption90")}
            return CaseConfig(**flags, custom=bool(entry.get("custom", False)), label=entry.get("name"))
    except CaseError as exc:
        raise ManifestError(str(exc), CaseError.code) from None
    raise ManifestError(f"case entry {entry!r} must be a preset name or a mapping")


def _section(doc: dict, name: str) -> dict:
    v = doc.get(name) or {}
    if not isinstance(v, dict):
        raise ManifestError(f"section {name!r} must be a mapping")
    return v


def _int(d: dict, key: str, default=None) -> int:
    v = d.get(key, default)
    if v is None:
        raise ManifestError(f"missing required key {key!r}")
    if isinstance(v, bool) or not isinstance(v, int):
        raise ManifestError(f"{key!r} must be an integer, got {v!r}")
    return v


def load_manifest(path) -> RunManifest:
    p = Path(path)
    if not p.is_file():
        raise ManifestError(f"manifest not found: {p}", "MISSING_FILE")
    try:
        doc = yaml.safe_load(p.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ManifestError(f"{p}: {exc}") from None
    if not isinstance(doc, dict):
        raise ManifestError(f"{p}: top level must be a mapping")
    base = p.parent

    if "data" not in doc:
        raise ManifestError("missing required key 'data'")
    data_dir = (base / str(doc["data"])).resolve()
    if not data_dir.is_dir():
        raise ManifestError(f"data directory not found: {data_dir}", "MISSING_FILE")

    time = _section(doc, "time")
    raw_seasons = time.get("seasons") or []
    if not raw_seasons:
        raise ManifestError("time.seasons must list at least one season")
    seasons = []
    for s in raw_seasons:
        if not isinstance(s, dict) or "name" not in s:
            raise ManifestError(f"season entry {s!r} needs a name")
        days = tuple(tuple(int(v) for v in r) for r in s.get("days", [[0, 365]]))
        seasons.append(SeasonSpec(str(s["name"]), _int(s, "hours"), float(s.get("represents", HOURS_PER_YEAR)),
                                  days))

    scen = _section(doc, "scenarios")
    series = scen.get("series")
    series_dir = (data_dir / str(series)) if series else None
    if series_dir is not None and not series_dir.is_dir():
        raise ManifestError(f"series directory not found: {series_dir}", "MISSING_FILE")
    probs = scen.get("probabilities")

    raw_cases = doc.get("cases") or []
    if not isinstance(raw_cases, list) or not raw_cases:
        raise ManifestError("cases must be a non-empty list")
    cases = tuple(_case(c) for c in raw_cases)

    solver = _section(doc, "solver")
    kind = solver.get("kind", "embedded")
    if kind not in SOLVERS:
        raise ManifestError(f"unknown solver {kind!r}; choose from {', '.join(SOLVERS)}")
    cmd = solver.get("command")
    if isinstance(cmd, str):
        cmd = shlex.split(cmd)

    model = _section(doc, "model")
    sign = model.get("discount_sign", -1)
    if sign not in (-1, 1):
        raise ManifestError("model.discount_sign must be -1 or 1")
    io = _section(doc, "io")
    units = doc.get("units") or {}
    if not isinstance(units, dict):
        raise ManifestError("units must map file names to unit strings")

    return RunManifest(
        path=p,
        data_dir=data_dir,
        periods=_int(time, "periods"),
        period_length=_int(time, "period_length"),
        seasons=tuple(seasons),
        scenario_count=_int(scen, "count", 1),
        seed=_int(scen, "seed", 0),
        series_dir=series_dir,
        cases=cases,
        solver=kind,
        solver_command=tuple(cmd) if cmd else None,
        export_mps=bool(solver.get("export_mps", False)),
        out_dir=base / str(io.get("out", "out")),
        discount_sign=int(sign),
        repurposing=bool(model.get("repurposing", True)),
        start_year=_int(time, "start_year", 2024),
        probabilities=tuple(float(v) for v in probs) if probs else None,
        unit_overrides={str(k): str(v) for k, v in units.items()},
    )
