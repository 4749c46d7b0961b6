from fractions import Fraction as F

import numpy as np
import pytest

from efcpd.eppf import Params

# the parameter grid of the acceptance criteria, theta in (-alpha, 0) included
PARAM_GRID = [
    Params(F(1, 2), F(1, 2)),
    Params(F(1, 2), F(2)),
    Params(F(1, 3), F(1, 4)),
    Params(F(1, 2), F(-1, 4)),
    Params(F(2, 3), F(1)),
]

_ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, title: str, passed: bool, detail: str = "") -> None:
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {title}"
    if detail:
        line += f"  ({detail})"
    _ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
