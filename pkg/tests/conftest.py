from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from tangent_cylinders.config_io import load

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

DATA = Path(__file__).resolve().parents[1] / "data"

# Filled by test_acceptance; printed at the end of the session.
ACCEPTANCE_RESULTS: dict[tuple[int, str], tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def pinned7():
    return load(DATA / "unit_d3_n7.json")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, tag in sorted(ACCEPTANCE_RESULTS):
        ok, text = ACCEPTANCE_RESULTS[(num, tag)]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num:>2}. {text}")
