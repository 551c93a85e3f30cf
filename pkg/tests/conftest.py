import numpy as np
import pytest

from ncmaxwell.lattice import LatticeSpec

ACCEPTANCE_LINES = []


def record_acceptance(criterion, passed, message):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {message}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


@pytest.fixture
def acceptance():
    return record_acceptance


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def lat8():
    return LatticeSpec((8, 8, 8), 1.0)


@pytest.fixture
def lat_odd():
    return LatticeSpec((5, 7, 9), 0.3)
