import numpy as np
import pytest

from geomeas.states import random_qubit, random_state


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_unit(rng, size=None):
    v = rng.standard_normal((3,) if size is None else (size, 3))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def random_acute(rng):
    # rejection sampling on the positive octant of the unit sphere
    while True:
        v = np.abs(rng.standard_normal(3))
        v /= np.linalg.norm(v)
        if np.max(v**2) < 0.5:
            return v


def random_obtuse(rng):
    while True:
        v = np.abs(rng.standard_normal(3))
        v /= np.linalg.norm(v)
        if np.max(v**2) > 0.5:
            return v


def states(rng, n):
    return [random_state(rng) for _ in range(n)]


def qubits(rng, n):
    return [random_qubit(rng) for _ in range(n)]


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
