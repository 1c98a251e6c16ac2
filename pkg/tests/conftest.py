import math

import numpy as np
import pytest

from scenarios import make_params

_acceptance_lines: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20140)


@pytest.fixture
def broadside_params():
    return make_params()


@pytest.fixture
def oblique_params():
    return make_params(theta_l=math.pi / 3)


@pytest.fixture(scope="session")
def acceptance_report():
    def record(criterion: str, passed: bool, detail: str = ""):
        status = "PASS" if passed else "FAIL"
        _acceptance_lines.append(f"[{status}] {criterion}" + (f" :: {detail}" if detail else ""))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
