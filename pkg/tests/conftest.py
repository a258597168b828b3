import numpy as np
import pytest

from cfteleport.gaussian_core import random_covariance

_CRITERIA = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


@pytest.fixture
def random_states(rng):
    return [random_covariance(rng) for _ in range(50)]


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(number, passed, detail)``."""

    def record(number, passed, detail=""):
        _CRITERIA[number] = (bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        passed, detail = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
