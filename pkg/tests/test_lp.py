import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hydraplan.lp import DuplicateNameError, LinearProgram, LPError, Status, solve
from hydraplan.lp.external import (read_solution_file, solve_external, solve_with_scipy,
                                   write_solution_file)
from hydraplan.lp.mps import MPSError, parse_mps, read_mps, to_mps, write_mps

from helpers import dual_objective, empty_lp, enumerate_lp, mixed_lp, one_var_lp, random_lp

FIXTURES = Path(__file__).parent / "fixtures"


# -- container ---------------------------------------------------------------

def test_first_variable_gets_handle_zero():
    lp = LinearProgram()
    assert lp.add_variable("x", 0.0, math.inf, 1.0) == 0


def test_duplicate_variable_name_is_rejected():
    lp = LinearProgram()
    lp.add_variable("x")
    with pytest.raises(DuplicateNameError) as exc:
        lp.add_variable("x")
    assert exc.value.code == "DUPLICATE_NAME"


def test_handles_follow_insertion_order_for_many_variables():
    lp = LinearProgram()
    handles = [lp.add_variable(f"v{k}") for k in range(100_000)]
    assert handles == list(range(100_000))
    assert lp.variables[99_999].name == "v99999"


def test_zero_coefficients_are_dropped_and_repeats_summed():
    lp = LinearProgram()
    x, y = lp.add_variable("x"), lp.add_variable("y")
    lp.add_constraint("r", [(x, 1.0), (y, 0.0), (x, 2.0)], "<=", 1.0)
    assert lp.constraints[0].coeffs == {x: 3.0}


def test_unknown_sense_and_handle_are_errors():
    lp = LinearProgram()
    lp.add_variable("x")
    with pytest.raises(LPError):
        lp.add_constraint("r", {0: 1.0}, "<", 1.0)
    with pytest.raises(LPError):
        lp.add_constraint("r", {3: 1.0}, "<=", 1.0)


# -- simplex -------------------------------------------------------------------

def test_two_variable_lp_hits_the_best_vertex():
    lp = LinearProgram()
    x, y = lp.add_variable("x", obj=-1.0), lp.add_variable("y", obj=-1.0)
    lp.add_constraint("c", {x: 1.0, y: 1.0}, "<=", 1.0)
    best = min(-a - b for a, b in ((0, 0), (1, 0), (0, 1)))
    sol = solve(lp)
    assert sol.status == Status.OPTIMAL
    assert sol.objective == pytest.approx(best, abs=1e-12)


def test_empty_feasible_set_is_infeasible():
    lp = LinearProgram()
    x = lp.add_variable("x", obj=1.0)
    lp.add_constraint("lo", {x: 1.0}, ">=", 1.0)
    lp.add_constraint("hi", {x: 1.0}, "<=", 0.0)
    assert solve(lp).status == Status.INFEASIBLE


def test_ray_gives_unbounded():
    lp = LinearProgram()
    lp.add_variable("x", obj=-1.0)
    assert solve(lp).status == Status.UNBOUNDED


def test_unbounded_with_rows():
    lp = LinearProgram()
    x, y = lp.add_variable("x", obj=-1.0), lp.add_variable("y")
    lp.add_constraint("c", {x: 1.0, y: -1.0}, "<=", 2.0)
    assert solve(lp).status == Status.UNBOUNDED


def test_degenerate_lp_terminates():
    # several constraints tight at the optimum (0, 0)
    lp = LinearProgram()
    x, y = lp.add_variable("x", obj=1.0), lp.add_variable("y", obj=1.0)
    for k in range(6):
        lp.add_constraint(f"c{k}", {x: k + 1.0, y: 1.0}, ">=", 0.0)
    sol = solve(lp)
    assert sol.status == Status.OPTIMAL and sol.objective == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("seed", range(25))
def test_simplex_matches_vertex_enumeration(seed):
    lp = random_lp(np.random.default_rng(1000 + seed))
    status, best = enumerate_lp(lp)
    sol = solve(lp)
    assert sol.status.value == status
    if status == "Optimal":
        assert sol.objective == pytest.approx(best, rel=1e-7, abs=1e-7)
        assert lp.max_violation(sol.x) <= 1e-7
        gap = abs(sol.objective - dual_objective(lp, sol.duals))
        assert gap <= 1e-8 * max(1.0, abs(sol.objective))


@pytest.mark.parametrize("seed", range(15))
def test_simplex_matches_highs(seed):
    lp = random_lp(np.random.default_rng(5000 + seed))
    ours, ref = solve(lp), solve_with_scipy(lp)
    if ref.status == Status.OPTIMAL:
        assert ours.status == Status.OPTIMAL
        assert ours.objective == pytest.approx(ref.objective, rel=1e-7, abs=1e-7)
    elif ours.status == Status.OPTIMAL:
        pytest.fail(f"HiGHS says {ref.status}, embedded says Optimal")


def test_row_duals_have_the_minimisation_signs():
    lp = LinearProgram()
    x = lp.add_variable("x", obj=1.0)
    y = lp.add_variable("y", obj=3.0)
    lp.add_constraint("need", {x: 1.0, y: 1.0}, ">=", 4.0)
    lp.add_constraint("cap", {x: 1.0}, "<=", 3.0)
    sol = solve(lp)
    # x = 3, y = 1; one more unit of demand costs 3, one more unit of cap saves 2
    assert sol.objective == pytest.approx(6.0)
    assert sol.duals[0] == pytest.approx(3.0)
    assert sol.duals[1] == pytest.approx(-2.0)


# -- MPS -----------------------------------------------------------------------

@pytest.mark.parametrize("fixture, build", [("one_var.mps", one_var_lp), ("empty.mps", empty_lp),
                                            ("mixed.mps", mixed_lp)])
def test_golden_mps_is_byte_identical(fixture, build):
    assert to_mps(build()) == (FIXTURES / fixture).read_text(encoding="ascii")


def test_golden_files_parse_back():
    for fixture, build in (("one_var.mps", one_var_lp), ("mixed.mps", mixed_lp)):
        assert read_mps(FIXTURES / fixture).structurally_equal(build())


def test_empty_lp_has_empty_columns_section():
    text = to_mps(LinearProgram("empty"))
    assert "COLUMNS\nRHS\n" in text
    assert parse_mps(text).num_variables == 0


@pytest.mark.parametrize("seed", range(20))
def test_mps_round_trip_random(seed, tmp_path):
    lp = random_lp(np.random.default_rng(seed), name=f"r{seed}")
    write_mps(lp, tmp_path / "m.mps")
    assert read_mps(tmp_path / "m.mps").structurally_equal(lp)


_finite = st.floats(min_value=-1e12, max_value=1e12, allow_nan=False, allow_infinity=False)


@st.composite
def lps(draw):
    n = draw(st.integers(0, 6))
    m = draw(st.integers(0, 6)) if n else 0
    lp = LinearProgram("h")
    for j in range(n):
        lo = draw(st.one_of(st.just(0.0), st.just(-math.inf), _finite))
        up = draw(st.one_of(st.just(math.inf), _finite.filter(lambda v, lo=lo: v >= lo)))
        if up < lo:
            up = lo
        lp.add_variable(f"v{j}", lo, up, draw(_finite))
    for i in range(m):
        coeffs = draw(st.dictionaries(st.integers(0, n - 1), _finite, max_size=n))
        lp.add_constraint(f"c{i}", coeffs, draw(st.sampled_from(["<=", "=", ">="])), draw(_finite))
    lp.obj_constant = draw(_finite)
    return lp


@settings(max_examples=100, deadline=None)
@given(lps())
def test_mps_round_trip_property(lp):
    assert parse_mps(to_mps(lp)).structurally_equal(lp)


def test_mps_rejects_whitespace_names():
    lp = LinearProgram("bad")
    lp.add_variable("has space")
    with pytest.raises(MPSError) as exc:
        to_mps(lp)
    assert exc.value.code == "NON_ASCII_NAME"


def test_mps_parse_error_reports_line():
    with pytest.raises(MPSError) as exc:
        parse_mps("NAME x\nROWS\n Q  r\nENDATA\n")
    assert exc.value.line == 3


# -- external solver bridge --------------------------------------------------

def test_solution_file_round_trip(tmp_path):
    write_solution_file(tmp_path / "s.sol", ["a", "b"], [1.5, -0.25], Status.OPTIMAL, 3.0)
    status, values = read_solution_file(tmp_path / "s.sol")
    assert status == Status.OPTIMAL and values == {"a": 1.5, "b": -0.25}


def test_external_bridge_agrees_with_embedded(tmp_path):
    lp = mixed_lp()
    ext, emb = solve_external(lp, workdir=tmp_path), solve(lp)
    assert ext.status == emb.status == Status.OPTIMAL
    assert ext.objective == pytest.approx(emb.objective, rel=1e-9)
    assert list(tmp_path.iterdir()) == []
