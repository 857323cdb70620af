from pathlib import Path

import numpy as np
import pytest

from dommove import PointSet

FIXTURES = Path(__file__).parent / "fixtures"

WORKED_P = [(2.0, 2.0, 2.0), (2.0, 2.2, 1.5), (3.0, 1.6, 1.6)]
WORKED_Q = [(2.0, 1.2, 2.1), (2.0, 2.1, 1.0), (4.0, 1.5, 1.5)]


@pytest.fixture
def worked_p():
    return PointSet.from_rows(WORKED_P, "P")


@pytest.fixture
def worked_q():
    return PointSet.from_rows(WORKED_Q, "Q")


def random_pair(rng, max_p=5, max_q=5, dims=(2, 3, 4), low=0.0, high=10.0):
    dim = int(rng.choice(dims))
    n_p = int(rng.integers(1, max_p + 1))
    n_q = int(rng.integers(1, max_q + 1))
    p = PointSet(rng.uniform(low, high, (n_p, dim)), "P")
    q = PointSet(rng.uniform(low, high, (n_q, dim)), "Q")
    return p, q


def naive_pareto(points):
    """O(n^2) reference filter written independently of the library."""
    keep = []
    for i, a in enumerate(points):
        beaten = False
        for k, b in enumerate(points):
            if k == i:
                continue
            le = all(x <= y for x, y in zip(b, a))
            lt = any(x < y for x, y in zip(b, a))
            if le and (lt or k < i):
                beaten = True
                break
        if not beaten:
            keep.append(i)
    return keep


ACCEPTANCE: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
