import numpy as np
import pytest

from dommove import (
    DegenerateInstanceError,
    DomError,
    PointSet,
    dom_biobjective,
    group_cost,
    inward_neighbor,
    solve_bb,
    solve_bruteforce,
    verify_certificate,
)
from dommove.biobjective import _group


def test_inward_neighbor_tie_goes_to_lowest_index():
    r = PointSet.from_rows([(0, 2), (2, 0), (1, 1)])
    assert inward_neighbor((1, 1), r) == 0


def test_inward_neighbor_cheapest():
    r = PointSet.from_rows([(3, 3), (0, 5), (2, 2)])
    # moving (3,3) onto (2,2) costs 2, moving (0,5) costs 3
    assert inward_neighbor((2, 2), r) == 0


def test_inward_neighbor_matches_cost_table():
    rng = np.random.default_rng(21)
    for _ in range(100):
        pts = rng.uniform(0, 10, (5, 2))
        r = PointSet(pts)
        k = int(rng.integers(0, 5))
        costs = [group_cost(pts[i], [pts[k]])[0] if i != k else np.inf for i in range(5)]
        assert inward_neighbor(pts[k], r, exclude=k) == int(np.argmin(costs))


def test_inward_neighbor_degenerate():
    with pytest.raises(DegenerateInstanceError):
        inward_neighbor((1, 1), PointSet.from_rows([(1, 1)]))


def test_biobjective_only():
    with pytest.raises(DomError, match="biobjective only"):
        dom_biobjective(PointSet.from_rows([(1, 1, 1)]), PointSet.from_rows([(1, 1, 1)]))


def test_dominating_p_gives_zero():
    p = PointSet.from_rows([(0, 1), (1, 0)])
    q = PointSet.from_rows([(1, 2), (2, 1)])
    cert = dom_biobjective(p, q)
    assert cert.value == 0.0
    assert verify_certificate(p, q, cert)


def test_small_example():
    p = PointSet.from_rows([(0, 3), (3, 0)])
    q = PointSet.from_rows([(1, 2), (2, 1)])
    # enumeration of the four assignments gives 2, 2, 2, 4
    assert solve_bruteforce(p, q).value == pytest.approx(2.0)
    assert dom_biobjective(p, q).value == pytest.approx(2.0)


def test_loop_is_resolved():
    # q0 and q1 are each other's cheapest neighbor, far from P
    P = np.array([[0.0, 10.0], [10.0, 0.0]])
    Q = np.array([[4.0, 5.0], [5.0, 4.0]])
    a = _group(P, Q)
    assert a[0] == a[1]


@pytest.mark.parametrize("kind", ["uniform", "grid", "front"])
def test_matches_exact_solvers(kind):
    rng = np.random.default_rng({"uniform": 1, "grid": 2, "front": 3}[kind])
    for _ in range(100):
        n_p, n_q = int(rng.integers(1, 9)), int(rng.integers(1, 9))
        if kind == "uniform":
            p, q = rng.uniform(0, 10, (n_p, 2)), rng.uniform(0, 10, (n_q, 2))
        elif kind == "grid":
            p, q = rng.integers(0, 6, (n_p, 2)).astype(float), rng.integers(0, 6, (n_q, 2)).astype(float)
        else:
            x, y = rng.uniform(0, 1, n_p), rng.uniform(0, 1, n_q)
            p = np.c_[x, 1 - x] + rng.normal(0, 0.05, (n_p, 2))
            q = np.c_[y, 1 - y] + rng.normal(0, 0.05, (n_q, 2))
        P, Q = PointSet(p), PointSet(q)
        cert = dom_biobjective(P, Q)
        assert verify_certificate(P, Q, cert)
        assert cert.value == pytest.approx(solve_bb(P, Q)[0].value, abs=1e-9)
