import numpy as np
import pytest

from dommove import (
    DimensionMismatchError,
    DomError,
    EmptySetError,
    PointSet,
    dominates,
    group_cost,
    pareto_filter,
    reduce_instance,
    solve_bruteforce,
    weakly_dominates,
)
from conftest import WORKED_P, WORKED_Q, naive_pareto, random_pair


@pytest.mark.parametrize(
    "p, q, expected",
    [
        ((2.0, 2.0, 2.0), (2.0, 1.2, 2.1), False),
        ((3.0, 1.6, 1.6), (4.0, 1.5, 1.5), False),
        ((1.0, 2.0), (1.0, 2.0), True),
        ((1.0, 2.0), (1.5, 2.0), True),
    ],
)
def test_weakly_dominates(p, q, expected):
    assert weakly_dominates(p, q) is expected


def test_weakly_dominates_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        weakly_dominates((1.0, 2.0), (1.0, 2.0, 3.0))


def test_antisymmetry():
    rng = np.random.default_rng(3)
    for _ in range(500):
        a, b = rng.integers(0, 3, (2, 3)).astype(float)
        if weakly_dominates(a, b) and weakly_dominates(b, a):
            assert np.array_equal(a, b)


def test_strict_dominance():
    assert dominates((1, 1), (1, 2))
    assert not dominates((1, 1), (1, 1))


def test_point_set_rejects_nan_and_ragged():
    with pytest.raises(DomError):
        PointSet(np.array([[1.0, np.nan]]))
    with pytest.raises(DimensionMismatchError):
        PointSet.from_rows([(1, 2), (1, 2, 3)])


def test_point_set_is_read_only():
    s = PointSet.from_rows([(1, 2)])
    with pytest.raises(ValueError):
        s.points[0, 0] = 5.0


def test_pareto_filter_examples():
    s = PointSet.from_rows([(1, 1), (2, 2), (0, 3)])
    assert pareto_filter(s).points.tolist() == [[1, 1], [0, 3]]
    dup = PointSet.from_rows([(1, 1), (1, 1)])
    assert pareto_filter(dup).points.tolist() == [[1, 1]]


def test_pareto_filter_empty():
    empty = PointSet.from_rows([], dim=2)
    assert len(pareto_filter(empty)) == 0


def test_pareto_filter_matches_naive():
    rng = np.random.default_rng(7)
    for _ in range(200):
        pts = rng.integers(0, 4, (6, int(rng.integers(1, 4)))).astype(float)
        kept = pareto_filter(PointSet(pts)).points
        assert np.array_equal(kept, pts[naive_pareto(pts.tolist())])


def test_pareto_filter_idempotent():
    rng = np.random.default_rng(8)
    s = PointSet(rng.integers(0, 5, (40, 3)).astype(float))
    once = pareto_filter(s)
    assert pareto_filter(once) == once


def test_reduce_all_dominated():
    red = reduce_instance(PointSet.from_rows([(0, 0)]), PointSet.from_rows([(1, 1), (0, 2)]))
    assert red.q_kept == ()
    assert len(red.q_set) == 0


def test_reduce_worked_example_keeps_everything():
    red = reduce_instance(PointSet.from_rows(WORKED_P), PointSet.from_rows(WORKED_Q))
    assert red.p_kept == (0, 1, 2)
    assert red.q_kept == (0, 1, 2)


def test_reduce_empty_p():
    with pytest.raises(EmptySetError, match="empty dominating set"):
        reduce_instance(PointSet.from_rows([], dim=2), PointSet.from_rows([(1, 1)]))


def test_reduced_sets_are_clean():
    rng = np.random.default_rng(11)
    for _ in range(100):
        p, q = random_pair(rng, 8, 8)
        red = reduce_instance(p, q)
        assert pareto_filter(red.p_set) == red.p_set
        assert pareto_filter(red.q_set) == red.q_set
        for a in red.p_set:
            for b in red.q_set:
                assert not weakly_dominates(a, b)


def test_reduce_preserves_value():
    rng = np.random.default_rng(12)
    for _ in range(150):
        # integer grid so that dominance, duplicates and ties actually occur
        dim = int(rng.integers(1, 4))
        p = PointSet(rng.integers(0, 4, (int(rng.integers(1, 6)), dim)).astype(float))
        q = PointSet(rng.integers(0, 4, (int(rng.integers(1, 6)), dim)).astype(float))
        red = reduce_instance(p, q)
        full = solve_bruteforce(p, q, preprocess=False).value
        reduced = solve_bruteforce(red.p_set, red.q_set, preprocess=False).value if len(red.q_set) else 0.0
        assert abs(full - reduced) <= 1e-12


def test_group_cost_worked_example():
    cost, moved = group_cost((2.0, 2.2, 1.5), WORKED_Q)
    assert cost == pytest.approx(1.5, abs=1e-12)
    assert moved.tolist() == [2.0, 1.2, 1.0]
    cost, _ = group_cost((2.0, 2.0, 2.0), [(2.0, 1.2, 2.1)])
    assert cost == pytest.approx(0.8, abs=1e-12)


def test_group_cost_trivial_cases():
    cost, moved = group_cost((1.0, 1.0), [(2.0, 3.0)])
    assert cost == 0.0 and moved.tolist() == [1.0, 1.0]
    cost, moved = group_cost((1.0, 1.0), [])
    assert cost == 0.0 and moved.tolist() == [1.0, 1.0]


def test_group_cost_properties():
    rng = np.random.default_rng(13)
    for _ in range(300):
        dim = int(rng.integers(1, 5))
        p = rng.uniform(-5, 5, dim)
        g1 = rng.uniform(-5, 5, (int(rng.integers(1, 4)), dim))
        g2 = rng.uniform(-5, 5, (int(rng.integers(1, 4)), dim))
        c1, moved = group_cost(p, g1)
        c2, _ = group_cost(p, g2)
        c12, _ = group_cost(p, np.vstack([g1, g2]))
        assert np.all(moved[None, :] <= g1)
        assert c12 >= c1 - 1e-12  # monotone in the group
        assert c12 <= c1 + c2 + 1e-12  # subadditive
        better = p - rng.uniform(0, 1, dim)
        assert group_cost(better, g1)[0] <= c1 + 1e-12
        t = rng.uniform(-3, 3, dim)
        assert group_cost(p + t, g1 + t)[0] == pytest.approx(c1, abs=1e-9)
