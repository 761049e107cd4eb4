import numpy as np
import pytest

from discpower.linalg import random_unitary, tensor


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_locals(rng):
    return tensor(random_unitary(2, rng), random_unitary(2, rng))


def pytest_terminal_summary(terminalreporter):
    # acceptance lines are collected by tests/test_acceptance.py
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
