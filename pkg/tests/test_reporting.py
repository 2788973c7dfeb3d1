import json
import math

import pytest

from hydraplan.lp import Status, solve
from hydraplan.model import CaseConfig, assemble
from hydraplan.reporting import (COST_CATEGORIES, ReportError, SolutionReport, build_report, diff_reports,
                                 expected_capacity_factor, read_report, write_diff, write_report_files)

import helpers
from helpers import ELEC, GAS

BASE = CaseConfig.preset("Base")


def _report(d, p, case=BASE):
    m = assemble(d, p, None, case)
    sol = solve(m.lp)
    assert sol.status == Status.OPTIMAL
    return build_report(sol, m, p, d)


def test_zero_cost_instance_reports_zero_everywhere():
    d = helpers.dims()
    r = _report(d, helpers.params(d))
    assert r.objective == 0.0
    assert set(r.costs) == set(COST_CATEGORIES) and all(v == 0.0 for v in r.costs.values())


@pytest.mark.parametrize("case", ["Base", "AST90", "AST"])
def test_categories_sum_to_objective(toy, case):
    _, _, solved = toy
    r = solved[case][2]
    assert abs(r.category_total - r.objective) <= 1e-8 * abs(r.objective)


def test_full_load_electrolyzer_has_unit_capacity_factor():
    d = helpers.dims(techs=(GAS, ELEC), commodities=("Power", "H2"), hours=3)
    p = helpers.params(d, electrolyzer_power={"elec": 50.0},
                       invest_cost={("gas", 1): 1.0, ("elec", 1): 1.0},
                       demand={("H2", "A", h, 1, "S1"): 2.0 for h in range(3)})
    r = _report(d, p)
    assert r.capacity_factors[("elec", "A", 1)] == pytest.approx(1.0)
    assert expected_capacity_factor(r, 1) == pytest.approx(1.0)
    assert r.hydrogen[("A", 1)] == pytest.approx(6.0)


def test_unused_electrolyzer_has_no_capacity_factor():
    d = helpers.dims(techs=(GAS, ELEC), commodities=("Power", "H2"))
    r = _report(d, helpers.params(d, electrolyzer_power={"elec": 50.0}))
    assert r.capacity_factors[("elec", "A", 1)] is None
    assert expected_capacity_factor(r, 1) is None


def test_self_diff_is_zero(toy):
    r = toy[2]["Base"][2]
    diff = diff_reports(r, r)
    assert all(row[4] == 0.0 for row in diff.rows)


def test_diff_delta_is_consistent(toy):
    _, _, solved = toy
    a, b = solved["Base"][2], solved["AST90"][2]
    diff = diff_reports(a, b)
    assert diff.objective_delta == pytest.approx(b.objective - a.objective)
    assert diff.objective_delta >= 0
    assert math.fsum(diff.section("cost").values()) == pytest.approx(diff.objective_delta, rel=1e-8)


def test_mismatched_dimensions_are_rejected(toy):
    r = toy[2]["Base"][2]
    other = SolutionReport.from_dict({**r.to_dict(), "signature": {**r.signature, "hours": 1}})
    with pytest.raises(ReportError) as exc:
        diff_reports(r, other)
    assert exc.value.code == "DIMENSION_MISMATCH"


def test_report_json_round_trip(toy, tmp_path):
    r = toy[2]["AST90"][2]
    paths = write_report_files(r, tmp_path)
    assert [p.name for p in paths] == ["costs_AST90.csv", "generation_AST90.csv", "hydrogen_AST90.csv",
                                       "capacity_AST90.csv", "report_AST90.json"]
    back = read_report(paths[-1])
    assert back.to_dict() == r.to_dict()
    doc = json.loads(paths[-1].read_text())
    assert doc["fixed_h2_convention"]["scale"] == r.h2_scale


def test_cost_file_lists_every_category(toy, tmp_path):
    r = toy[2]["Base"][2]
    lines = write_report_files(r, tmp_path)[0].read_text().splitlines()
    assert lines[0] == "category,value_eur"
    assert [l.split(",")[0] for l in lines[1:]] == list(COST_CATEGORIES) + ["objective"]


def test_diff_file(toy, tmp_path):
    _, _, solved = toy
    path = write_diff(diff_reports(solved["Base"][2], solved["AST"][2]), tmp_path / "d.csv")
    header, first = path.read_text().splitlines()[:2]
    assert header == "section,key,Base,AST,delta" and first.startswith("objective,total,")


def test_non_optimal_solution_is_not_reported():
    d = helpers.dims()
    p = helpers.params(d, demand={("Power", "A", 0, 1, "S1"): 5.0}, max_build={("gas", "A", 1): 0.0})
    m = assemble(d, p, None, BASE)
    sol = solve(m.lp)
    assert sol.status == Status.INFEASIBLE
    with pytest.raises(ReportError):
        build_report(sol, m, p, d)
