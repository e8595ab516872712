import numpy as np
import pytest

from sechjcm import PulseParams, make_standard_jcm

ACCEPTANCE_LINES = []


def record(criterion, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def resonant():
    return make_standard_jcm(1.0, 1.0)


@pytest.fixture
def fig_pulse():
    return PulseParams(lambda0=5.0, tau=1.0, t0=-10.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
