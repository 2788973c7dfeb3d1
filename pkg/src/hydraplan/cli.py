"""Batch driver: ``hydraplan validate|sample|run|compare|export-mps``.

Exit codes: 0 success, 2 data, manifest or case error, 3 a case was
infeasible or unbounded, 4 the solver failed.
"""

from __future__ import annotations

import argparse
import json
import os
import shutil
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .dimensions import ModelDimensions, load_dimensions, validate_dimensions
from .errors import DataError, Issue
from .lp import LinearProgram, LPError, NumericalFailure, Solution, Status, solve
from .lp.external import solve_external, solve_with_scipy, write_solution_file
from .lp.mps import write_mps
from .manifest import ManifestError, RunManifest, SeasonSpec, load_manifest
from .model import AssembledModel, CaseConfig, CaseError, assemble
from .model.audit import audit
from .parameters import ParameterStore, load_parameters
from .reporting import ReportError, build_report, diff_reports, read_report, write_diff, write_report_files
from .scenarios import ScenarioSet, flatten_to_parameters, load_series, sample_scenarios

EXIT_OK, EXIT_DATA, EXIT_INFEASIBLE, EXIT_SOLVER = 0, 2, 3, 4


def _threads(n_jobs: int) -> int:
    raw = os.environ.get("HYDRA_THREADS", "")
    try:
        cap = int(raw) if raw else (os.cpu_count() or 1)
    except ValueError:
        cap = 1
    return max(1, min(cap, n_jobs))


# -- pipeline ----------------------------------------------------------------

def sample_from_manifest(m: RunManifest, dims: ModelDimensions) -> ScenarioSet:
    if m.series_dir is None:
        raise ManifestError("scenarios.series is not set; nothing to sample from")
    series = load_series(m.series_dir, dims)
    issues = series.validate()
    if issues:
        raise DataError(issues)
    return sample_scenarios(series, m.scenario_count, m.season_pools(), m.seed)


def prepare(m: RunManifest) -> tuple[ModelDimensions, ParameterStore]:
    """Dimensions and parameters of a manifest, with scenarios sampled from its series."""
    dims = load_dimensions(m.data_dir, m.model_seasons(), m.periods, m.period_length, m.scenario_names,
                           m.probabilities, m.start_year)
    issues = validate_dimensions(dims)
    if issues:
        raise DataError(issues)
    tables = flatten_to_parameters(sample_from_manifest(m, dims), dims) if m.series_dir else None
    params = load_parameters(m.data_dir, dims, tables, m.discount_sign, m.unit_overrides)
    return dims, params


def solve_lp(lp: LinearProgram, kind: str = "embedded", command=None, workdir=None) -> Solution:
    if kind == "embedded":
        return solve(lp)
    if kind == "highs":
        return solve_with_scipy(lp)
    if kind == "external-mps":
        return solve_external(lp, command, workdir=workdir)
    raise ManifestError(f"unknown solver {kind!r}")


@dataclass
class CaseResult:
    case: CaseConfig
    model: AssembledModel
    solution: Solution


def _run_case(case: CaseConfig, m: RunManifest, dims, params, workdir) -> CaseResult:
    model = assemble(dims, params, None, case, repurposing=m.repurposing)
    sol = solve_lp(model.lp, m.solver, m.solver_command, workdir)
    return CaseResult(case, model, sol)


def _solve_all(m: RunManifest, dims, params, workdir) -> list[CaseResult]:
    with ThreadPoolExecutor(max_workers=_threads(len(m.cases))) as pool:
        futures = [pool.submit(_run_case, c, m, dims, params, workdir) for c in m.cases]
        return [f.result() for f in futures]


# -- commands ----------------------------------------------------------------

def cmd_run(m: RunManifest) -> int:
    dims, params = prepare(m)
    out = Path(m.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    workdir = None
    if m.solver == "external-mps":
        workdir = Path(tempfile.mkdtemp(prefix=".work-", dir=out))
    try:
        results = _solve_all(m, dims, params, workdir)
    finally:
        if workdir is not None:
            shutil.rmtree(workdir, ignore_errors=True)

    summary = {"manifest": m.describe(), "cases": []}
    code = EXIT_OK
    for r in results:
        name = r.case.name
        if m.export_mps:
            write_mps(r.model.lp, out / f"model_{name}.mps")
            (out / f"rows_{name}.txt").write_text(r.model.manifest(), encoding="utf-8")
        sol = r.solution
        write_solution_file(out / f"solution_{name}.sol", sol.variable_names, sol.x, sol.status,
                            sol.objective if sol.status == Status.OPTIMAL else None)
        entry = {"case": name, "flags": list(r.case.flags), "status": sol.status.value,
                 "variables": r.model.lp.num_variables, "constraints": r.model.lp.num_constraints,
                 "row_counts": dict(r.model.row_counts), "skipped": dict(r.model.skipped)}
        if sol.status == Status.OPTIMAL:
            report = build_report(sol, r.model, params, dims)
            write_report_files(report, out)
            entry["objective"] = report.objective
            entry["costs"] = dict(report.costs)
            entry["audit"] = audit(r.model, params, dims, sol.x)
        else:
            code = EXIT_INFEASIBLE
            print(f"case {name}: {sol.status.value}", file=sys.stderr)
        summary["cases"].append(entry)
    (out / "summary.json").write_text(json.dumps(summary, indent=1) + "\n", encoding="utf-8")
    return code


def cmd_sample(m: RunManifest) -> int:
    dims = load_dimensions(m.data_dir, m.model_seasons(), m.periods, m.period_length, m.scenario_names,
                           m.probabilities, m.start_year)
    scen = sample_from_manifest(m, dims)
    out = Path(m.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "scenarios.json").write_text(scen.to_json() + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_export_mps(m: RunManifest) -> int:
    dims, params = prepare(m)
    out = Path(m.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for case in m.cases:
        model = assemble(dims, params, None, case, repurposing=m.repurposing)
        write_mps(model.lp, out / f"model_{case.name}.mps")
        (out / f"rows_{case.name}.txt").write_text(model.manifest(), encoding="utf-8")
    return EXIT_OK


def cmd_compare(report_a, report_b, out_dir=".") -> int:
    for p in (report_a, report_b):
        if not Path(p).is_file():
            raise DataError([Issue("MISSING_FILE", f"report not found: {p}", source=str(p))])
    a, b = read_report(report_a), read_report(report_b)
    diff = diff_reports(a, b)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_diff(diff, out / f"diff_{a.case}_{b.case}.csv")
    print(f"objective delta ({b.case} - {a.case}): {diff.objective_delta!r}")
    return EXIT_OK


def validation_issues(m: RunManifest) -> list[Issue]:
    """Every dimension and parameter issue of a manifest's data, without solving."""
    try:
        dims = load_dimensions(m.data_dir, m.model_seasons(), m.periods, m.period_length, m.scenario_names,
                               m.probabilities, m.start_year)
    except DataError as exc:
        return exc.issues
    issues = validate_dimensions(dims)
    if issues:
        return issues
    try:
        tables = flatten_to_parameters(sample_from_manifest(m, dims), dims) if m.series_dir else None
        load_parameters(m.data_dir, dims, tables, m.discount_sign, m.unit_overrides)
    except DataError as exc:
        return exc.issues
    return []


def cmd_validate(m: RunManifest) -> int:
    issues = validation_issues(m)
    print(json.dumps({"ok": not issues, "issues": [i.as_dict() for i in issues]}, indent=1))
    return EXIT_DATA if issues else EXIT_OK


def _adhoc_manifest(data_dir: str, periods: int, period_length: int, hours: int) -> RunManifest:
    """Time structure for ``validate DATA_DIR`` without a manifest: hourly CSVs, one scenario."""
    d = Path(data_dir)
    if not d.is_dir():
        raise ManifestError(f"data directory not found: {d}", "MISSING_FILE")
    return RunManifest(path=d, data_dir=d, periods=periods, period_length=period_length,
                       seasons=(SeasonSpec("all", hours, float(hours)),), scenario_count=1, seed=0,
                       series_dir=None, cases=(CaseConfig.preset("Base"),))


# -- argument parsing ----------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hydraplan", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def manifest_cmd(name: str, help_: str) -> argparse.ArgumentParser:
        s = sub.add_parser(name, help=help_)
        s.add_argument("--manifest", required=name != "validate", help="run manifest (YAML)")
        s.add_argument("--out", help="output directory (overrides io.out)")
        s.add_argument("--seed", type=int, help="scenario seed (overrides scenarios.seed)")
        s.add_argument("--cases", help="comma-separated case names (overrides cases)")
        s.add_argument("--solver", help="embedded, external-mps or highs (overrides solver.kind)")
        return s

    v = manifest_cmd("validate", "check a data directory or manifest without solving")
    v.add_argument("data_dir", nargs="?", help="data directory with hourly CSVs (instead of --manifest)")
    v.add_argument("--periods", type=int, default=1)
    v.add_argument("--period-length", type=int, default=1)
    v.add_argument("--hours", type=int, default=24)
    manifest_cmd("sample", "write the sampled scenarios as scenarios.json")
    manifest_cmd("run", "solve every case and write reports")
    manifest_cmd("export-mps", "write each case as MPS plus its row-count manifest")

    c = sub.add_parser("compare", help="difference of two report_<case>.json files")
    c.add_argument("report_a")
    c.add_argument("report_b")
    c.add_argument("--out", default=".", help="directory for diff_<a>_<b>.csv")
    return p


COMMANDS = {"run": cmd_run, "sample": cmd_sample, "export-mps": cmd_export_mps, "validate": cmd_validate}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "compare":
            return cmd_compare(args.report_a, args.report_b, args.out)
        if args.command == "validate" and not args.manifest:
            if not args.data_dir:
                raise ManifestError("validate needs --manifest or a data directory")
            m = _adhoc_manifest(args.data_dir, args.periods, args.period_length, args.hours)
        else:
            m = load_manifest(args.manifest)
        m = m.with_overrides(out=args.out, seed=args.seed, cases=args.cases, solver=args.solver)
        return COMMANDS[args.command](m)
    except (DataError, ManifestError, CaseError, ReportError) as exc:
        issues = exc.issues if isinstance(exc, DataError) else [Issue(getattr(exc, "code", "ERROR"), str(exc))]
        for i in issues:
            print(f"error: {i}", file=sys.stderr)
        return EXIT_DATA
    except (NumericalFailure, LPError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
