import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from greedy_cs import Dictionary

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

INV_SQRT2 = 1.0 / math.sqrt(2.0)

# filled by test_acceptance, printed at the end of the run
ACCEPTANCE_LINES = []


def ex_matrix():
    """Columns e1, e2 and (e1 + e2) / sqrt(2)."""
    return np.array([[1.0, 0.0, INV_SQRT2],
                     [0.0, 1.0, INV_SQRT2]])


@pytest.fixture
def phi_ex():
    return Dictionary(ex_matrix())


@pytest.fixture
def eye3():
    return Dictionary(np.eye(3))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
