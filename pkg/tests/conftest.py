import numpy as np
import pytest

ACCEPTANCE_LINES = []


class ScriptedRng:
    """Stand-in for ``numpy.random.Generator`` that replays fixed draws."""

    def __init__(self, randoms=(), integers=()):
        self._randoms = list(randoms)
        self._integers = list(integers)

    def random(self, size=None):
        if size is None:
            return self._randoms.pop(0)
        n = int(np.prod(size))
        out = np.array([self._randoms.pop(0) for _ in range(n)], dtype=float)
        return out.reshape(size)

    def integers(self, high, size=None):
        return self._integers.pop(0)


class CountingObjective:
    """Wraps a callable and counts calls, for budget checks."""

    def __init__(self, func):
        self.func = func
        self.calls = 0

    def __call__(self, x):
        self.calls += 1
        return self.func(x)


def random_search_best(func, dim, lb, ub, budget, seed):
    X = np.random.default_rng(seed).uniform(lb, ub, size=(budget, dim))
    return min(func(x) for x in X)


@pytest.fixture
def record_acceptance():
    def record(criterion, passed, detail=""):
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
