"""Compose the emitters into one deterministic-equivalent LP."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..dimensions import ModelDimensions
from ..lp import LinearProgram
from ..parameters import ParameterStore, ScenarioTables
from . import emitters as em
from .cases import CaseConfig
from .catalog import DecisionVariableCatalog, build_catalog

FAMILIES = ("objective", "balance", "capacity", "operation", "storage", "resource", "emission",
            "green", "repurpose", "fixed_h2")


@dataclass
class AssembledModel:
    lp: LinearProgram
    catalog: DecisionVariableCatalog
    case: CaseConfig
    row_counts: dict[str, int] = field(default_factory=dict)
    skipped: dict[str, str] = field(default_factory=dict)
    h2_scale: float = 1.0

    def manifest(self) -> str:
        """Row counts per family as plain ``key: value`` lines."""
        lines = [f"case: {self.case.name}",
                 f"variables: {self.lp.num_variables}",
                 f"constraints: {self.lp.num_constraints}",
                 f"fixed_h2_scale: {self.h2_scale!r}"]
        for fam in FAMILIES:
            if fam in self.skipped:
                lines.append(f"{fam}: skipped ({self.skipped[fam]})")
            else:
                lines.append(f"{fam}: {self.row_counts.get(fam, 0)}")
        return "\n".join(lines) + "\n"


def assemble(dims: ModelDimensions, params: ParameterStore, scen: ScenarioTables | None, case: CaseConfig,
             repurposing: bool = True, name: str | None = None) -> AssembledModel:
    """Build the LP for ``case``.

    ``scen`` overrides the hourly tables held in ``params`` when given.  Rows
    are added in the fixed family order of :data:`FAMILIES`.
    """
    if scen is not None:
        params = params.with_scenarios(scen)
    lp = LinearProgram(name or f"hydraplan_{case.name}")
    cat = build_catalog(lp, dims, params, case, repurposing=repurposing)

    obj = em.emit_objective(cat, params, dims)
    for var, c in em.emit_repurpose_cost(cat, params, dims).items():
        obj[var] = obj.get(var, 0.0) + c
    for var in sorted(obj):
        lp.add_objective(var, obj[var])

    skipped: dict[str, str] = {}
    if not case.green and not case.exemption90:
        skipped["green"] = f"no green-hydrogen rules in case {case.name}"
    if not cat.repurpose:
        skipped["repurpose"] = "no NG arc shared with an H2 pipeline" if repurposing else "disabled"
    if not params.fixed_h2:
        skipped["fixed_h2"] = "no fixed hydrogen target"
    if not params.emission_cap:
        skipped["emission"] = "no emission cap"
    if not params.resource_limit:
        skipped["resource"] = "no resource limits"

    families = [
        ("balance", lambda: em.emit_flow_balance(cat, params, dims)),
        ("capacity", lambda: em.emit_capacity_accounting(cat, params, dims)),
        ("operation", lambda: em.emit_operation_limits(cat, params, dims)),
        ("storage", lambda: em.emit_storage_dynamics(cat, dims)),
        ("resource", lambda: em.emit_resource_limits(cat, params, dims)),
        ("emission", lambda: em.emit_emission_cap(cat, params, dims)),
        ("green", lambda: em.emit_green_hydrogen(cat, params, dims, case)),
        ("repurpose", lambda: em.emit_pipeline_repurposing(cat, params, dims)),
        ("fixed_h2", lambda: em.emit_fixed_hydrogen(cat, params, dims)),
    ]
    counts = {"objective": len(obj)}
    for fam, emit in families:
        rows = [] if fam in skipped else emit()
        for r in rows:
            lp.add_constraint(r.name, r.coeffs, r.sense, r.rhs)
        counts[fam] = len(rows)
    return AssembledModel(lp, cat, case, counts, skipped, em.fixed_h2_scale(dims))
