from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from scorebias.empirical import split_from_cells, split_groups
from scorebias.ingest import COMPAS_PRESET, read_csv

DATA = Path(__file__).parent / "data"
COMPAS_CSV = DATA / "compas-scores-two-years.csv"

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def compas():
    frame, report = read_csv(COMPAS_CSV, COMPAS_PRESET)
    return frame, report


@pytest.fixture(scope="session")
def compas_frame(compas):
    return compas[0]


@pytest.fixture(scope="session")
def compas_split(compas_frame):
    return split_groups(compas_frame)


@pytest.fixture
def toy_split():
    """a0={1,2}, b0={3,4}; the unfavorable cells copy them, so pooled is uniform on {1,2,3,4}."""
    return split_from_cells({"a0": [1.0, 2.0], "a1": [1.0, 2.0],
                             "b0": [3.0, 4.0], "b1": [3.0, 4.0]})


def random_cells(seed, low=5, high=60, ties=False):
    rng = np.random.default_rng(seed)
    cells = {}
    for k in ("a0", "a1", "b0", "b1"):
        s = rng.uniform(0, 1, int(rng.integers(low, high)))
        cells[k] = np.round(s, 1) if ties else s
    return cells


ACCEPTANCE_LINES = []


def record_criterion(label: str, ok: bool, detail: str) -> bool:
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
