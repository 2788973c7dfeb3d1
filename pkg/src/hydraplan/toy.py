"""The bundled three-node toy instance and seeded random variants of it.

NOR is exempt from the green rules in both periods, ESP is rich in solar and
wind, DEU is the demand centre.  Hourly series are synthetic: load with daily
and yearly cycles, clear-sky solar shaped by cloud noise, autoregressive wind
and a seasonal reservoir inflow.
"""

from __future__ import annotations

from dataclasses import replace
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.signal import lfilter

from .dimensions import HOURS_PER_YEAR, ModelDimensions, load_dimensions, make_seasons
from .parameters import ParameterStore, load_parameters
from .scenarios import (LOAD, HistoricalSeries, SeasonPool, flatten_to_parameters, load_series,
                        sample_scenarios, series_unit)

TOY_SEASON = SeasonPool("day", 24)
TOY_SCENARIOS = ("S1", "S2")

# node -> (mean load MW, solar peak factor, wind mean factor, reservoir inflow MW)
_CLIMATE = {
    "NOR": (22.0, None, 0.38, 17.0),
    "ESP": (35.0, 0.95, 0.30, None),
    "DEU": (70.0, 0.65, 0.33, None),
}


def toy_dir() -> Path:
    return Path(str(resources.files("hydraplan") / "data" / "toy"))


def toy_manifest() -> Path:
    return Path(str(resources.files("hydraplan") / "data" / "toy_manifest.yaml"))


def synthetic_series(seed: int, years: int = 1) -> HistoricalSeries:
    rng = np.random.default_rng(seed)
    n = years * HOURS_PER_YEAR
    t = np.arange(n)
    hod = t % 24
    doy = (t // 24) % 365
    yearly = np.cos(2 * np.pi * (doy - 15) / 365.0)          # +1 mid-January
    data = {}
    for node, (load, solar, wind, inflow) in _CLIMATE.items():
        daily = 1.0 + 0.18 * np.sin(2 * np.pi * (hod - 7) / 24.0)
        noise = rng.normal(0.0, 0.04, n)
        data[(LOAD, node)] = np.round(load * daily * (1.0 + 0.12 * yearly) * (1.0 + noise), 4)
        if solar is not None:
            elevation = np.clip(np.sin(np.pi * (hod - 6) / 12.0), 0.0, None)
            clouds = np.clip(1.0 - 0.4 * rng.beta(2.0, 3.0, n // 24 + 1).repeat(24)[:n], 0.0, 1.0)
            season = 1.0 - 0.35 * yearly
            data[("solar", node)] = np.round(np.clip(solar * elevation * clouds * season, 0.0, 1.0), 4)
        if wind is not None:
            z = lfilter([1.0], [1.0, -0.97], rng.normal(0.0, 0.25, n))
            level = wind * (1.0 + 0.25 * yearly) * np.exp(0.5 * z - 0.5)
            data[("wind", node)] = np.round(np.clip(level, 0.0, 1.0), 4)
        if inflow is not None:
            melt = 1.0 - 0.5 * yearly
            data[("hydro", node)] = np.round(inflow * melt * (1.0 + rng.normal(0.0, 0.05, n)), 4)
    return HistoricalSeries(data)


def write_series(series: HistoricalSeries, root: Path, dims: ModelDimensions | None = None) -> None:
    for (q, node), vec in sorted(series.data.items()):
        d = Path(root) / q
        d.mkdir(parents=True, exist_ok=True)
        unit = series_unit(q, dims)
        with open(d / f"{node}.csv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write("hour,value,unit\n")
            for h, v in enumerate(vec):
                fh.write(f"{h},{v:.4f},{unit}\n")


def toy_dimensions(scenarios: tuple[str, ...] = TOY_SCENARIOS, data_dir: Path | None = None) -> ModelDimensions:
    seasons = make_seasons([(TOY_SEASON.name, TOY_SEASON.hours, HOURS_PER_YEAR)])
    return load_dimensions(data_dir or toy_dir(), seasons, 2, 3, scenarios)


def toy_instance(seed: int = 42, series: HistoricalSeries | None = None,
                 data_dir: Path | None = None) -> tuple[ModelDimensions, ParameterStore]:
    """The bundled toy with scenarios sampled from its series (or ``series``)."""
    d = Path(data_dir or toy_dir())
    dims = toy_dimensions(data_dir=d)
    if series is None:
        series = load_series(d / "series", dims)
    scen = sample_scenarios(series, len(dims.scenarios), [TOY_SEASON], seed)
    params = load_parameters(d, dims, flatten_to_parameters(scen, dims))
    return dims, params


def random_toy(seed: int) -> tuple[ModelDimensions, ParameterStore]:
    """A seeded variant of the toy: fresh synthetic weather and perturbed costs and loads."""
    rng = np.random.default_rng(seed)
    dims, base = toy_instance(seed=seed, series=synthetic_series(seed + 1))

    def jitter(d: dict, lo: float, hi: float) -> dict:
        return {k: v * rng.uniform(lo, hi) for k, v in sorted(d.items(), key=lambda kv: repr(kv[0]))}

    load_scale = {n: rng.uniform(0.8, 1.2) for n in dims.nodes}
    demand = {k: (v * load_scale[k[1]] if k[0] == "Power" else v) for k, v in base.demand.items()}
    params = replace(
        base,
        invest_cost=jitter(base.invest_cost, 0.6, 1.4),
        op_cost=jitter(base.op_cost, 0.7, 1.3),
        initial_capacity=jitter(base.initial_capacity, 0.7, 1.3),
        emission_cap=jitter(base.emission_cap, 0.8, 1.2),
        demand=demand,
    )
    return dims, params
