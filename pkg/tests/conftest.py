import math

import pytest

from cubicwave.config import DEFAULT
from cubicwave.duffing import PhasePoint
from cubicwave.lifespan import x_critical
from cubicwave.threshold import beta

SQRT2 = math.sqrt(2.0)


@pytest.fixture(scope="session")
def cfg():
    return DEFAULT


@pytest.fixture(scope="session")
def x_c():
    return x_critical(DEFAULT)


@pytest.fixture(scope="session")
def beta0():
    return beta(0.0, DEFAULT)


@pytest.fixture(scope="session")
def threshold_point(beta0):
    return PhasePoint(0.0, beta0)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if not LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(LINES):
        terminalreporter.write_line(LINES[n])
