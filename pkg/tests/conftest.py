import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from winhopf import Grid, LaguerreBasis, Symbol, TestVectorSet

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def grid():
    # panel width 0.25: every half-integer shift is on the grid
    return Grid(T=40.0, N=1280)


@pytest.fixture(scope="session")
def lag():
    return LaguerreBasis(120)


@pytest.fixture(scope="session")
def vecs(grid):
    return TestVectorSet(0, 8).vectors(grid)


@pytest.fixture(scope="session")
def lvecs(lag):
    return TestVectorSet(0, 8).vectors(lag)


def rational(zeros, poles, gain=1.0):
    return Symbol.from_zpk(zeros, poles, gain)


R = rational([-2j + 0.5], [-1j]) * rational([1.5j], [2j - 0.3])


@pytest.fixture(scope="session")
def data_dir():
    return Path(__file__).resolve().parent.parent / "demos" / "data"


def pytest_terminal_summary(terminalreporter):
    lines = getattr(sys.modules.get("test_acceptance"), "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
