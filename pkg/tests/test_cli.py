import filecmp
import json
import shutil
from pathlib import Path

import pytest
import yaml

from hydraplan.cli import EXIT_DATA, EXIT_INFEASIBLE, EXIT_OK, main
from hydraplan.lp.mps import read_mps
from hydraplan.toy import toy_dir, toy_manifest

from helpers import minimal_dataset, write_csv

REPORT_FILES = ("costs", "generation", "hydrogen", "capacity")


@pytest.fixture
def toy_copy(tmp_path):
    """The bundled toy manifest and data under ``tmp_path``, solved with HiGHS."""
    shutil.copytree(toy_dir(), tmp_path / "toy")
    doc = yaml.safe_load(toy_manifest().read_text())
    doc["solver"]["kind"] = "highs"
    path = tmp_path / "run.yaml"
    path.write_text(yaml.safe_dump(doc))
    return path


def _minimal_manifest(root, solver="embedded", cases=("Base",), **extra):
    minimal_dataset(root / "data", hours=4)
    doc = {"data": "data",
           "time": {"periods": 1, "period_length": 3, "seasons": [{"name": "s", "hours": 4, "represents": 4}]},
           "scenarios": {"count": 1, "seed": 1},
           "cases": list(cases), "solver": {"kind": solver, **extra}, "io": {"out": "out"}}
    path = root / "m.yaml"
    path.write_text(yaml.safe_dump(doc))
    return path


def test_toy_run_writes_reports_and_summary(toy_copy, tmp_path):
    out = tmp_path / "out"
    assert main(["run", "--manifest", str(toy_copy), "--out", str(out)]) == EXIT_OK
    csvs = sorted(p.name for p in out.glob("*.csv"))
    assert csvs == sorted(f"{k}_{c}.csv" for k in REPORT_FILES for c in ("Base", "AST90"))
    summary = json.loads((out / "summary.json").read_text())
    cases = {c["case"]: c for c in summary["cases"]}
    assert set(cases) == {"Base", "AST90"}
    assert all(c["status"] == "Optimal" for c in cases.values())
    assert cases["AST90"]["objective"] >= cases["Base"]["objective"]
    assert cases["Base"]["row_counts"]["green"] == 0
    assert max(max(c["audit"].values()) for c in cases.values()) <= 1e-6
    assert str(tmp_path) not in (out / "summary.json").read_text()


def test_runs_are_byte_identical(toy_copy, tmp_path):
    for d in ("a", "b"):
        assert main(["run", "--manifest", str(toy_copy), "--out", str(tmp_path / d)]) == EXIT_OK
    cmp = filecmp.dircmp(tmp_path / "a", tmp_path / "b")
    assert sorted(cmp.left_only + cmp.right_only + cmp.diff_files) == []
    for name in cmp.common_files:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_missing_csv_exits_with_data_error(toy_copy, tmp_path, capsys):
    victim = tmp_path / "toy" / "invest_cost.csv"
    victim.unlink()
    assert main(["run", "--manifest", str(toy_copy), "--out", str(tmp_path / "o")]) == EXIT_DATA
    assert str(victim) in capsys.readouterr().err


def test_unknown_case_is_a_data_error(toy_copy, capsys):
    assert main(["run", "--manifest", str(toy_copy), "--cases", "Base,AST91"]) == EXIT_DATA
    assert "CASE_INCONSISTENT" in capsys.readouterr().err


def test_compare(toy_copy, tmp_path, capsys):
    out = tmp_path / "out"
    main(["run", "--manifest", str(toy_copy), "--out", str(out)])
    base, strict = out / "report_Base.json", out / "report_AST90.json"

    assert main(["compare", str(base), str(base), "--out", str(tmp_path / "same")]) == EXIT_OK
    rows = (tmp_path / "same" / "diff_Base_Base.csv").read_text().splitlines()[1:]
    assert rows and all(float(r.rsplit(",", 1)[1]) == 0.0 for r in rows)

    assert main(["compare", str(base), str(strict), "--out", str(tmp_path / "d")]) == EXIT_OK
    line = capsys.readouterr().out.strip().splitlines()[-1]
    assert line.startswith("objective delta (AST90 - Base):") and float(line.rsplit(" ", 1)[1]) >= 0


def test_compare_rejects_mismatched_reports(toy_copy, tmp_path):
    out = tmp_path / "out"
    main(["run", "--manifest", str(toy_copy), "--out", str(out)])
    doc = json.loads((out / "report_AST90.json").read_text())
    doc["signature"]["hours"] = 48
    other = tmp_path / "other.json"
    other.write_text(json.dumps(doc))
    assert main(["compare", str(out / "report_Base.json"), str(other), "--out", str(tmp_path)]) == EXIT_DATA


def test_compare_missing_report(tmp_path):
    assert main(["compare", str(tmp_path / "a.json"), str(tmp_path / "b.json")]) == EXIT_DATA


# -- validate ------------------------------------------------------------------

def _validate(capsys, *argv):
    code = main(["validate", *argv])
    return code, json.loads(capsys.readouterr().out)


def test_validate_consistent_dataset(tmp_path, capsys):
    root = minimal_dataset(tmp_path / "d")
    code, doc = _validate(capsys, str(root), "--hours", "4", "--period-length", "3")
    assert code == EXIT_OK and doc == {"ok": True, "issues": []}


def test_validate_reports_missing_hour(tmp_path, capsys):
    root = minimal_dataset(tmp_path / "d")
    write_csv(root / "demand.csv", "commodity,node,period,scenario,hour,value,unit",
              [("Power", "A", 1, "S1", h, 10, "MW") for h in (0, 1, 3)])
    code, doc = _validate(capsys, str(root), "--hours", "4", "--period-length", "3")
    assert code == EXIT_DATA and not doc["ok"]
    missing = [i for i in doc["issues"] if i["code"] == "MISSING_PARAMETER"]
    assert [i["where"] for i in missing] == [["Power", "A", "2", "1", "S1"]]


def test_validate_reports_one_way_arc(tmp_path, capsys):
    root = minimal_dataset(tmp_path / "d")
    write_csv(root / "nodes.csv", "node", [("A",), ("B",)])
    write_csv(root / "technologies.csv", "technology,kind,commodity,vres,electrolyzer,reservoir",
              [("onshore_wind", "production", "Power", 1, 0, 0), ("gas", "production", "Power", 0, 0, 0),
               ("line", "transmission", "Power", 0, 0, 0)])
    write_csv(root / "arcs.csv", "commodity,from_node,to_node", [("Power", "A", "B")])
    code, doc = _validate(capsys, str(root), "--hours", "4", "--period-length", "3")
    assert code == EXIT_DATA
    assert [i["code"] for i in doc["issues"]] == ["ARC_ASYMMETRY"]


def test_validate_toy_manifest(toy_copy, capsys):
    code, doc = _validate(capsys, "--manifest", str(toy_copy))
    assert code == EXIT_OK and doc["ok"]


# -- sample, export-mps and other solvers --------------------------------------

def test_sample_writes_scenarios(toy_copy, tmp_path):
    out = tmp_path / "s"
    assert main(["sample", "--manifest", str(toy_copy), "--out", str(out)]) == EXIT_OK
    assert [p.name for p in out.iterdir()] == ["scenarios.json"]
    a = (out / "scenarios.json").read_text()
    main(["sample", "--manifest", str(toy_copy), "--out", str(out), "--seed", "43"])
    assert (out / "scenarios.json").read_text() != a


def test_export_mps(toy_copy, tmp_path):
    out = tmp_path / "m"
    assert main(["export-mps", "--manifest", str(toy_copy), "--out", str(out), "--cases", "AST90"]) == EXIT_OK
    assert sorted(p.name for p in out.iterdir()) == ["model_AST90.mps", "rows_AST90.txt"]
    lp = read_mps(out / "model_AST90.mps")
    assert f"constraints: {lp.num_constraints}" in (out / "rows_AST90.txt").read_text()


def test_embedded_run_writes_only_under_out(tmp_path):
    path = _minimal_manifest(tmp_path, cases=("Base", "AST"), export_mps=True)
    before = {p for p in tmp_path.rglob("*")}
    assert main(["run", "--manifest", str(path)]) == EXIT_OK
    new = {p for p in tmp_path.rglob("*")} - before
    assert new and all(p.is_relative_to(tmp_path / "out") for p in new)
    assert (tmp_path / "out" / "model_AST.mps").is_file()


def test_external_solver_matches_embedded(tmp_path):
    objs = {}
    for solver in ("embedded", "external-mps"):
        path = _minimal_manifest(tmp_path / solver, solver=solver)
        assert main(["run", "--manifest", str(path)]) == EXIT_OK
        out = tmp_path / solver / "out"
        assert not list(out.glob(".work-*"))
        objs[solver] = json.loads((out / "summary.json").read_text())["cases"][0]["objective"]
    assert objs["external-mps"] == pytest.approx(objs["embedded"], rel=1e-9)


def test_infeasible_case_exit_code(tmp_path):
    path = _minimal_manifest(tmp_path)
    write_csv(tmp_path / "data" / "max_build.csv", "technology,node,period,value,unit",
              [("onshore_wind", "A", 1, 0, "MW"), ("gas", "A", 1, 0, "MW")])
    assert main(["run", "--manifest", str(path)]) == EXIT_INFEASIBLE
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["cases"][0]["status"] == "Infeasible"
