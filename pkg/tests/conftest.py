import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hydraplan.lp.external import solve_with_scipy  # noqa: E402
from hydraplan.model import PRESETS, CaseConfig, assemble  # noqa: E402
from hydraplan.reporting import build_report  # noqa: E402
from hydraplan.toy import toy_instance  # noqa: E402


@pytest.fixture(scope="session")
def toy():
    """Toy instance (seed 42) solved with HiGHS under every preset: case -> (model, solution, report)."""
    dims, params = toy_instance(42)
    out = {}
    for name in PRESETS:
        model = assemble(dims, params, None, CaseConfig.preset(name))
        sol = solve_with_scipy(model.lp)
        out[name] = (model, sol, build_report(sol, model, params, dims))
    return dims, params, out
