from pathlib import Path

import numpy as np
import pytest

from frri.data import DecisionSystem, NormalizationParams

ROOT = Path(__file__).resolve().parents[1]
KEEL = ROOT / "data" / "keel"


def make_ds(values, labels) -> DecisionSystem:
    """Decision system from already-normalized values (identity normalization)."""
    values = np.array(values, dtype=float)
    n_att = values.shape[1]
    params = NormalizationParams(np.zeros(n_att), np.ones(n_att), tuple(range(n_att)), n_att)
    labels = np.array([str(x) for x in labels], dtype=object)
    return DecisionSystem(values, labels, tuple(f"a{j + 1}" for j in range(n_att)),
                          tuple(dict.fromkeys(labels)), params)


def random_ds(rng, n_obj, n_att, n_cls=2) -> DecisionSystem:
    labels = [f"c{k}" for k in rng.integers(0, n_cls, n_obj)]
    return make_ds(rng.random((n_obj, n_att)), labels)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def acceptance(request):
    """Record a PASS/FAIL line for the acceptance summary printed after the run."""
    lines = request.config.__dict__.setdefault("_acceptance_lines", [])

    def record(criterion: str, ok: bool | None, detail: str = "") -> bool | None:
        status = "N/A " if ok is None else ("PASS" if ok else "FAIL")
        line = f"{status}  {criterion}" + (f": {detail}" if detail else "")
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.__dict__.get("_acceptance_lines")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
