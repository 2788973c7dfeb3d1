"""Bounded-variable primal revised simplex.

The basis inverse is kept as a sparse LU factorisation (SuperLU via scipy)
plus a product-form eta file that is folded back into a fresh factorisation
every ``REFACTOR_EVERY`` pivots.  Pricing is Dantzig's rule until either the
Dantzig budget is spent or a run of degenerate pivots is detected; from then
on Bland's smallest-index rule is used until the next strictly improving
pivot.  Since the objective strictly decreases between two switches back to
Dantzig, no basis can repeat and the method terminates.

Rows are brought to equality form with one slack per row; rows whose slack
cannot absorb the starting residual get an artificial column.  Phase 1
minimises the sum of artificials, phase 2 the scaled objective with the
artificials fixed at zero.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .program import EQ, GE, LE, LinearProgram, LPError

FEAS_TOL = 1e-7
OPT_TOL = 1e-9
PIVOT_TOL = 1e-9
REFACTOR_EVERY = 60
DEGENERATE_RUN = 50

_BASIC, _LOWER, _UPPER, _FREE = 0, 1, 2, 3


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


class NumericalFailure(LPError):
    code = "NUMERICAL_FAILURE"


@dataclass
class Solution:
    status: Status
    x: np.ndarray
    duals: np.ndarray
    objective: float
    iterations: int
    variable_names: tuple[str, ...] = ()

    def value(self, name: str) -> float:
        return float(self.x[self.variable_names.index(name)])

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.variable_names, self.x.tolist()))


def _pow2(v: np.ndarray) -> np.ndarray:
    # power-of-two factors keep scaling exact in floating point
    return np.exp2(np.round(np.log2(v)))


def geometric_scaling(A: sparse.csr_matrix, passes: int = 4):
    """Row and column factors ``(r, s)`` such that ``diag(r) A diag(s)`` is balanced."""
    m, n = A.shape
    r = np.ones(m)
    s = np.ones(n)
    if A.nnz == 0:
        return r, s
    absA = abs(A).tocsr()
    for _ in range(passes):
        S = sparse.diags(r) @ absA @ sparse.diags(s)
        S = S.tocsr()
        rmax = S.max(axis=1).toarray().ravel()
        rmin = _row_min_nonzero(S)
        ok = rmax > 0
        r[ok] = r[ok] / np.sqrt(rmax[ok] * rmin[ok])
        S = (sparse.diags(r) @ absA @ sparse.diags(s)).tocsc()
        cmax = S.max(axis=0).toarray().ravel()
        cmin = _row_min_nonzero(S.T.tocsr())
        ok = cmax > 0
        s[ok] = s[ok] / np.sqrt(cmax[ok] * cmin[ok])
    return _pow2(r), _pow2(s)


def _row_min_nonzero(S: sparse.csr_matrix) -> np.ndarray:
    out = np.zeros(S.shape[0])
    data, indptr = S.data, S.indptr
    nonempty = np.diff(indptr) > 0
    if data.size:
        mins = np.minimum.reduceat(data, indptr[:-1][nonempty])
        out[nonempty] = mins
    return out


class _Basis:
    """LU factorisation of the basis matrix plus an eta file."""

    def __init__(self, cols: sparse.csc_matrix, basis: np.ndarray):
        self.cols = cols
        self.m = cols.shape[0]
        self.refactor(basis)

    def refactor(self, basis: np.ndarray) -> None:
        B = self.cols[:, basis].tocsc()
        try:
            self.lu = splu(B, permc_spec="COLAMD", options={"SymmetricMode": False})
        except RuntimeError as exc:
            raise NumericalFailure(f"basis factorisation failed: {exc}") from exc
        self.etas: list[tuple[int, float, np.ndarray, np.ndarray]] = []

    def ftran(self, a: np.ndarray) -> np.ndarray:
        x = self.lu.solve(a)
        for r, wr, idx, vals in self.etas:
            xr = x[r] / wr
            if xr != 0.0:
                x[idx] -= vals * xr
            x[r] = xr
        return x

    def btran(self, c: np.ndarray) -> np.ndarray:
        u = c.copy()
        for r, wr, idx, vals in reversed(self.etas):
            u[r] = (u[r] - u[idx] @ vals) / wr
        return self.lu.solve(u, trans="T")

    def push(self, r: int, w: np.ndarray) -> None:
        idx = np.flatnonzero(w)
        idx = idx[idx != r]
        self.etas.append((r, float(w[r]), idx, w[idx].copy()))


def solve(lp: LinearProgram, max_iterations: int | None = None,
          dantzig_budget: int | None = None) -> Solution:
    """Solve ``lp`` (minimisation) and return a :class:`Solution`.

    Raises :class:`NumericalFailure` when the basis cannot be factorised or
    the final point fails the feasibility check after refactorisation.
    """
    c0, A0, senses, b0, lo0, up0 = lp.matrices()
    m, n = A0.shape
    names = tuple(v.name for v in lp.variables)
    if m == 0:
        return _solve_bounds_only(c0, lo0, up0, lp.obj_constant, names)

    rs, cs = geometric_scaling(A0)
    A = (sparse.diags(rs) @ A0 @ sparse.diags(cs)).tocsc()
    c = c0 * cs
    cmax = np.max(np.abs(c)) if n else 0.0
    obj_scale = 1.0 / float(_pow2(np.array([cmax]))[0]) if cmax > 0 else 1.0
    c = c * obj_scale
    b = b0 * rs
    with np.errstate(divide="ignore", invalid="ignore"):
        lo = np.where(np.isfinite(lo0), lo0 / cs, lo0)
        up = np.where(np.isfinite(up0), up0 / cs, up0)

    slack_lo = np.array([0.0 if s in (LE, EQ) else -math.inf for s in senses])
    slack_up = np.array([0.0 if s in (GE, EQ) else math.inf for s in senses])

    # starting nonbasic point for structurals
    x_struct = np.where(np.isfinite(lo), lo, np.where(np.isfinite(up), up, 0.0))
    resid = b - A @ x_struct
    need_art = (resid < slack_lo - FEAS_TOL) | (resid > slack_up + FEAS_TOL)
    art_rows = np.flatnonzero(need_art)
    k = art_rows.size
    art_sign = np.sign(resid[art_rows])

    cols = sparse.hstack([
        A,
        sparse.identity(m, format="csc"),
        sparse.csc_matrix((art_sign, (art_rows, np.arange(k))), shape=(m, k)),
    ]).tocsc()
    N = n + m + k
    lower = np.concatenate([lo, slack_lo, np.zeros(k)])
    upper = np.concatenate([up, slack_up, np.full(k, math.inf)])
    x = np.concatenate([x_struct, np.zeros(m), np.abs(resid[art_rows])])
    state = np.empty(N, dtype=np.int8)
    state[:n] = np.where(np.isfinite(lo), _LOWER, np.where(np.isfinite(up), _UPPER, _FREE))
    state[n:] = _LOWER
    state[n:n + m][slack_up == 0.0] = _UPPER
    state[n:n + m][slack_lo == 0.0] = _LOWER
    basis = np.arange(n, n + m)
    basis[art_rows] = n + m + np.arange(k)
    slack_basic = np.setdiff1d(np.arange(m), art_rows)
    x[n + slack_basic] = resid[slack_basic]
    state[basis] = _BASIC

    engine = _Engine(cols, b, lower, upper, x, state, basis, max_iterations, dantzig_budget, N + m)
    if k:
        cost1 = np.zeros(N)
        cost1[n + m:] = 1.0
        status = engine.run(cost1)
        infeas = float(np.sum(engine.x[n + m:]))
        if status != Status.OPTIMAL:
            raise NumericalFailure("phase 1 did not terminate at an optimum")
        if infeas > FEAS_TOL * max(1.0, k):
            return Solution(Status.INFEASIBLE, np.full(n, np.nan), np.full(m, np.nan), math.nan,
                            engine.iterations, names)
        engine.upper[n + m:] = 0.0
        engine.x[n + m:] = np.where(engine.state[n + m:] == _BASIC, engine.x[n + m:], 0.0)
    cost2 = np.concatenate([c, np.zeros(m + k)])
    status = engine.run(cost2)
    if status == Status.UNBOUNDED:
        return Solution(Status.UNBOUNDED, np.full(n, np.nan), np.full(m, np.nan), -math.inf,
                        engine.iterations, names)

    # final clean-up: fresh factorisation, recomputed basics
    engine.refresh()
    if engine.primal_infeasibility() > FEAS_TOL:
        status = engine.run(cost2)
        engine.refresh()
        if engine.primal_infeasibility() > FEAS_TOL:
            raise NumericalFailure("final basis is primal infeasible beyond tolerance")
    y_scaled = engine.basis_lu.btran(cost2[engine.basis])
    x_out = engine.x[:n] * cs
    duals = y_scaled * rs / obj_scale
    # nonbasic structurals sit exactly on their original bounds
    at_lo = engine.state[:n] == _LOWER
    at_up = engine.state[:n] == _UPPER
    x_out[at_lo] = lo0[at_lo]
    x_out[at_up] = up0[at_up]
    objective = float(c0 @ x_out + lp.obj_constant)
    return Solution(Status.OPTIMAL, x_out, duals, objective, engine.iterations, names)


def _solve_bounds_only(c, lo, up, const, names) -> Solution:
    x = np.zeros_like(c)
    for j, cj in enumerate(c):
        if cj > 0:
            if not np.isfinite(lo[j]):
                return Solution(Status.UNBOUNDED, np.full_like(c, np.nan), np.zeros(0), -math.inf, 0, names)
            x[j] = lo[j]
        elif cj < 0:
            if not np.isfinite(up[j]):
                return Solution(Status.UNBOUNDED, np.full_like(c, np.nan), np.zeros(0), -math.inf, 0, names)
            x[j] = up[j]
        else:
            x[j] = lo[j] if np.isfinite(lo[j]) else (up[j] if np.isfinite(up[j]) else 0.0)
    return Solution(Status.OPTIMAL, x, np.zeros(0), float(c @ x + const), 0, names)


class _Engine:
    def __init__(self, cols, b, lower, upper, x, state, basis, max_iterations, dantzig_budget, size):
        self.cols = cols
        self.colsT = cols.T.tocsr()
        self.b = b
        self.lower = lower
        self.upper = upper
        self.x = x
        self.state = state
        self.basis = basis
        self.iterations = 0
        self.max_iterations = max_iterations if max_iterations is not None else 50 * size + 1000
        self.dantzig_left = dantzig_budget if dantzig_budget is not None else 20 * size
        self.basis_lu = _Basis(cols, basis)
        self.since_refactor = 0

    def refresh(self) -> None:
        self.basis_lu.refactor(self.basis)
        self.since_refactor = 0
        nonbasic = self.state != _BASIC
        xn = np.where(nonbasic, self.x, 0.0)
        rhs = self.b - self.cols @ xn
        self.x[self.basis] = self.basis_lu.ftran(rhs)

    def primal_infeasibility(self) -> float:
        xb = self.x[self.basis]
        lo = self.lower[self.basis]
        up = self.upper[self.basis]
        return float(max(np.max(lo - xb, initial=0.0), np.max(xb - up, initial=0.0)))

    def run(self, cost: np.ndarray) -> Status:
        lower, upper, state, x = self.lower, self.upper, self.state, self.x
        fixed = lower == upper
        degenerate_run = 0
        bland = False
        while True:
            if self.iterations >= self.max_iterations:
                raise NumericalFailure(f"iteration limit {self.max_iterations} reached")
            y = self.basis_lu.btran(cost[self.basis])
            d = cost - self.colsT @ y
            elig = np.zeros(d.shape, dtype=bool)
            elig |= (state == _LOWER) & (d < -OPT_TOL)
            elig |= (state == _UPPER) & (d > OPT_TOL)
            elig |= (state == _FREE) & (np.abs(d) > OPT_TOL)
            elig &= ~fixed
            cand = np.flatnonzero(elig)
            if cand.size == 0:
                return Status.OPTIMAL
            if bland or self.dantzig_left <= 0:
                q = int(cand[0])
            else:
                q = int(cand[np.argmax(np.abs(d[cand]))])
                self.dantzig_left -= 1
            direction = 1.0 if d[q] < 0 else -1.0

            a_q = self.cols[:, q].toarray().ravel()
            w = self.basis_lu.ftran(a_q)
            delta = direction * w
            xb = x[self.basis]
            lb = lower[self.basis]
            ub = upper[self.basis]
            ratios = np.full(delta.shape, math.inf)
            dec = delta > PIVOT_TOL
            inc = delta < -PIVOT_TOL
            with np.errstate(invalid="ignore"):
                ratios[dec] = (xb[dec] - lb[dec]) / delta[dec]
                ratios[inc] = (ub[inc] - xb[inc]) / -delta[inc]
            ratios = np.where(np.isnan(ratios), math.inf, np.maximum(ratios, 0.0))
            t_basic = float(np.min(ratios)) if ratios.size else math.inf
            span = upper[q] - lower[q]
            if not math.isfinite(t_basic) and not math.isfinite(span):
                return Status.UNBOUNDED

            if span <= t_basic:
                # bound flip: entering variable crosses to its other bound
                t = span
                x[self.basis] = xb - t * delta
                if state[q] == _LOWER:
                    state[q] = _UPPER
                    x[q] = upper[q]
                else:
                    state[q] = _LOWER
                    x[q] = lower[q]
                self.iterations += 1
                degenerate_run = 0
                bland = False
                continue

            t = t_basic
            ties = np.flatnonzero(ratios <= t + 1e-12 * max(1.0, t))
            if bland:
                r = int(ties[np.argmin(self.basis[ties])])
            else:
                r = int(ties[np.argmax(np.abs(delta[ties]))])
            leaving = int(self.basis[r])
            x[self.basis] = xb - t * delta
            x[q] = x[q] + direction * t
            if delta[r] > 0:
                x[leaving] = lower[leaving]
                state[leaving] = _LOWER
            else:
                x[leaving] = upper[leaving]
                state[leaving] = _UPPER
            state[q] = _BASIC
            self.basis[r] = q
            self.iterations += 1

            if t <= 1e-12:
                degenerate_run += 1
                if degenerate_run >= DEGENERATE_RUN:
                    bland = True
            else:
                degenerate_run = 0
                bland = False

            self.since_refactor += 1
            if self.since_refactor >= REFACTOR_EVERY:
                self.refresh()
            else:
                self.basis_lu.push(r, w)
