import numpy as np
import pytest

from evpricing.demand_model import DemandModelPosterior
from evpricing.ingest import SlotGrid
from evpricing.objectives import Scenario


def make_model(sid="CS1", log_a=0.0, c=-1.0, noise=0.0, n=10):
    return DemandModelPosterior(sid, log_a, c, np.zeros((2, 2)), noise, n)


def make_scenario(base, capacity=None, c=-1.0, p_ref=0.2, p_min=0.01, p_max=1.0, grid=None, **kw):
    """Scenario over an arbitrary (n_stations, T) base profile.

    Grids other than 96 slots use ``1440 / T`` minute slots.
    """
    base = np.atleast_2d(np.asarray(base, dtype=float))
    n, T = base.shape
    grid = grid or SlotGrid(T, 1440 // T)
    capacity = np.full_like(base, 1e9) if capacity is None else np.atleast_2d(np.asarray(capacity, dtype=float))
    ids = [f"CS{i + 1}" for i in range(n)]
    cs = np.broadcast_to(np.asarray(c, dtype=float), (n,))
    models = {sid: make_model(sid, c=float(ci)) for sid, ci in zip(ids, cs)}
    return Scenario(ids, grid, p_min, p_max, p_ref, capacity, base, models, **kw)


@pytest.fixture
def scenario_factory():
    return make_scenario


@pytest.fixture
def tiny_config(tmp_path):
    """Few runs of very short GA searches over the bundled scenario."""
    import json

    path = tmp_path / "tiny_config.json"
    path.write_text(json.dumps({
        "runs": 2,
        "ga": {"generations": 3},
        "nsga2": {"population": 12},
        "nsga3": {"population": 12},
        "partitions": 3,
    }))
    return path


@pytest.fixture
def bundled_scenario():
    from evpricing import bundled_path

    return str(bundled_path("elastic_scenario.json"))


def _acceptance_lines(config):
    if not hasattr(config, "_acceptance_lines"):
        config._acceptance_lines = []
    return config._acceptance_lines


@pytest.fixture
def criterion(request):
    """Record and print one PASS/FAIL line for an acceptance criterion."""

    def record(number, title, ok, detail=""):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {title}" + (f" ({detail})" if detail else "")
        print(line)
        _acceptance_lines(request.config).append((number, line))
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = _acceptance_lines(config)
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
