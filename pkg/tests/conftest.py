import numpy as np
import pytest

from linediv.objective import Bounds, ObjectiveSpec


def affine_spec(dim=2, coef=None, offset=0.5, lo=-5.0, hi=5.0):
    coef = np.arange(1.0, dim + 1.0) if coef is None else np.asarray(coef, dtype=float)
    return ObjectiveSpec("affine", dim, Bounds.box(lo, hi, dim), lambda X: X @ coef + offset)


def parabola_spec(lo=-10.0, hi=10.0):
    return ObjectiveSpec("parabola", 1, Bounds.box(lo, hi, 1), lambda X: X[:, 0] ** 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def record_criterion(number, title, passed, detail=""):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title}" + (f" -- {detail}" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
