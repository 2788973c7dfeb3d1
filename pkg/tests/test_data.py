from dataclasses import replace

import pytest

from hydraplan.dimensions import ModelDimensions, load_dimensions, make_seasons, validate_dimensions
from hydraplan.errors import DataError
from hydraplan.parameters import lifetime_window, load_parameters, operational_weight, period_discount
from hydraplan.units import UnitError, conversion_factor

import helpers
from helpers import minimal_dataset, write_csv

# exact rationals: 1.05**-3 = 8000/9261 and 1 + 1/1.05 + 1/1.05**2 = 1261/441
DISCOUNT_P2 = 8000 / 9261
WEIGHT_3Y = 1261 / 441


# -- dimensions ----------------------------------------------------------------

def test_minimal_consistent_instance_is_valid():
    d = helpers.dims(hours=2)
    assert validate_dimensions(d) == []


def test_probabilities_must_sum_to_one():
    d = helpers.dims(scenarios=("S1", "S2"), probabilities=(0.6, 0.5))
    assert "PROB_SUM" in {i.code for i in validate_dimensions(d)}


def test_missing_reverse_arc_is_reported():
    d = helpers.dims(nodes=("ES", "DE"), techs=(helpers.ELEC, helpers.H2PIPE), commodities=("Power", "H2"),
                     arcs=(("H2", "ES", "DE"),))
    issues = validate_dimensions(d)
    assert [i.code for i in issues] == ["ARC_ASYMMETRY"]
    assert issues[0].where == ("H2", "ES", "DE")


def test_first_and_last_hours_follow_from_seasons():
    d = replace(helpers.dims(), seasons=make_seasons([("w", 3, 10), ("s", 2, 10)]))
    assert d.hours == (0, 1, 2, 3, 4)
    assert d.first_hours == {0, 3} and d.last_hours == {2, 4}
    assert d.season_of_hour[3].name == "s"


def test_dimensions_round_trip_through_dict():
    d = helpers.dims(nodes=("A", "B"), techs=(helpers.GAS, helpers.LINE), arcs=(("Power", "A", "B"), ("Power", "B", "A")),
                     exempt=(("A", 1),))
    assert ModelDimensions.from_dict(d.to_dict()) == d


def test_load_dimensions_reports_missing_file_path(tmp_path):
    root = minimal_dataset(tmp_path / "d")
    (root / "arcs.csv").unlink()
    with pytest.raises(DataError) as exc:
        load_dimensions(root, make_seasons([("s", 4, 8760)]), 1, 1, ("S1",))
    assert exc.value.codes == {"MISSING_FILE"}
    assert str(root / "arcs.csv") in str(exc.value)


# -- discounting ---------------------------------------------------------------

def test_first_period_is_the_reference_year():
    assert period_discount(1, 0.05, 3) == 1.0


def test_second_period_discount():
    assert period_discount(2, 0.05, 3) == pytest.approx(DISCOUNT_P2, rel=1e-14)
    assert period_discount(2, 0.05, 3) == pytest.approx(0.863837, abs=1e-6)


def test_zero_rate_does_not_discount():
    assert period_discount(2, 0.0, 3) == 1.0


def test_positive_exponent_flag():
    assert period_discount(2, 0.05, 3, sign=+1) == pytest.approx(9261 / 8000, rel=1e-14)


@pytest.mark.parametrize("r, L, expected", [(0.0, 3, 3.0), (0.05, 3, WEIGHT_3Y), (0.05, 1, 1.0)])
def test_operational_weight(r, L, expected):
    assert operational_weight(r, L) == pytest.approx(expected, rel=1e-14)


def test_lifetime_window():
    assert list(lifetime_window(3, 99)) == [1, 2, 3]
    assert list(lifetime_window(3, 1)) == [2, 3]


# -- units ---------------------------------------------------------------------

def test_unit_conversion():
    assert conversion_factor("kEUR/MW", "EUR/MW") == 1000.0
    assert conversion_factor("Mt/yr", "ton/yr") == 1e6
    assert conversion_factor("EUR/(kg/h)", "EUR/(ton/h)") == pytest.approx(1000.0)
    with pytest.raises(UnitError):
        conversion_factor("MW", "MWh")


# -- parameters ----------------------------------------------------------------

def _load(root, hours=4, periods=1, **kw):
    d = load_dimensions(root, make_seasons([("s", hours, 8760)]), periods, 3, ("S1",))
    return d, load_parameters(root, d, **kw)


def test_minimal_dataset_loads_with_unit_conversion(tmp_path):
    d, p = _load(minimal_dataset(tmp_path / "d"))
    assert p.invest_cost[("onshore_wind", 1)] == 500_000.0
    assert p.lifetime == {"onshore_wind": 8, "gas": 10}
    assert p.demand[("Power", "A", 3, 1, "S1")] == 10.0
    assert p.availability[("onshore_wind", "A", 2, 1, "S1")] == 0.5


def test_missing_hour_is_listed_with_full_index(tmp_path):
    root = minimal_dataset(tmp_path / "d")
    write_csv(root / "availability.csv", "technology,node,period,scenario,hour,value,unit",
              [("onshore_wind", "A", 1, "S1", h, 0.5, "fraction") for h in (0, 1, 2)])
    with pytest.raises(DataError) as exc:
        _load(root)
    missing = [i for i in exc.value.issues if i.code == "MISSING_PARAMETER"]
    assert [i.where for i in missing] == [("onshore_wind", "A", 3, 1, "S1")]


def test_repurposing_factors_are_stored_verbatim(tmp_path):
    root = minimal_dataset(tmp_path / "d")
    write_csv(root / "scalars.csv", "name,value,unit",
              [("discount_rate", 0.05, "1"), ("repurpose_cost_factor", 0.25, "1"), ("repurpose_flow_factor", 0.8, "1")])
    _, p = _load(root)
    assert p.repurpose_cost_factor == 0.25 and p.repurpose_flow_factor == 0.8


def test_hydrogen_targets_in_megatonnes(tmp_path):
    targets = (10, 10, 10, 11, 11, 12, 15, 15)
    root = minimal_dataset(tmp_path / "d", periods=8)
    write_csv(root / "fixed_hydrogen.csv", "period,value,unit", [(i + 1, v, "Mt/yr") for i, v in enumerate(targets)])
    _, p = _load(root, periods=8)
    assert [p.fixed_h2[i] for i in range(1, 9)] == [v * 1e6 for v in targets]


def test_unit_override_replaces_file_units(tmp_path):
    root = minimal_dataset(tmp_path / "d")
    _, p = _load(root, unit_overrides={"invest_cost.csv": "EUR/MW"})
    assert p.invest_cost[("gas", 1)] == 500.0


@pytest.mark.parametrize("fname, content, code", [
    ("op_cost.csv", "technology,period,value,unit\ngas,1,30,MW\nonshore_wind,1,0,EUR/MWh\n", "UNIT_MISMATCH"),
    ("op_cost.csv", "technology,period,value,unit\ngas,1,-3,EUR/MWh\nonshore_wind,1,0,EUR/MWh\n",
     "NEGATIVE_VALUE"),
    ("op_cost.csv", "technology,period,value,unit\ncoal,1,3,EUR/MWh\n*,1,1,EUR/MWh\n", "UNKNOWN_INDEX"),
    ("op_cost.csv", "technology,period,cost\ngas,1,3\n", "BAD_HEADER"),
])
def test_loader_error_codes(tmp_path, fname, content, code):
    root = minimal_dataset(tmp_path / "d")
    (root / fname).write_text(content, encoding="utf-8")
    with pytest.raises(DataError) as exc:
        _load(root)
    assert code in exc.value.codes


def test_all_issues_are_collected(tmp_path):
    root = minimal_dataset(tmp_path / "d")
    (root / "invest_cost.csv").unlink()
    (root / "op_cost.csv").write_text("technology,period,value,unit\ngas,1,-1,EUR/MWh\n", encoding="utf-8")
    with pytest.raises(DataError) as exc:
        _load(root)
    assert {"MISSING_FILE", "NEGATIVE_VALUE", "MISSING_PARAMETER"} <= exc.value.codes
