import numpy as np
import pytest

from dommove import LPParseError, NegativeCoordinateError, PointSet, solve_bb
from dommove.mip import (
    BINARY,
    assignment_from_solution,
    build_model,
    closed_form_counts,
    export_lp,
    feasible_point,
    objective_value,
    parse_lp,
    solve_model,
    violations,
)
from dommove.solver import evaluate_assignment
from conftest import FIXTURES, random_pair


def toy():
    return build_model(PointSet.from_rows([[2.0]]), PointSet.from_rows([[1.0]]))


def test_worked_example_counts(worked_p, worked_q):
    m = build_model(worked_p, worked_q)
    assert m.variable_counts() == {"zp": 9, "zpq": 27, "pl": 9, "xp": 3, "xpq": 9, "xpqd": 27}
    m.validate()


def test_counts_match_closed_form():
    rng = np.random.default_rng(31)
    for _ in range(20):
        n_p, n_q, dim = (int(x) for x in rng.integers(1, 6, 3))
        p = PointSet(rng.uniform(0, 10, (n_p, dim)))
        q = PointSet(rng.uniform(0, 10, (n_q, dim)))
        m = build_model(p, q, preprocess=False)
        expected = closed_form_counts(n_p, n_q, dim)
        assert len(m.constraints) == expected.pop("constraints")
        assert m.variable_counts() == expected
        assert m.constraint_counts() == {
            "zp_lo": n_p * dim, "zp_hi": n_p * dim,
            "zpq_lo": n_p * n_q * dim, "zpq_max": n_p * n_q * dim, "zpq_hi": n_p * n_q * dim,
            "link": n_p * n_q, "use": n_p, "assign": n_q,
        }


def test_model_invariants(worked_p, worked_q):
    m = build_model(worked_p, worked_q)
    meta = m.meta
    assert np.all(meta.lbp <= meta.ubp)
    assert np.array_equal(meta.big_m, np.maximum(0.0, meta.p[:, None, :] - meta.q[None, :, :]))
    assert all(coef == 1.0 for _, coef in m.objective)
    assert {n.split("_")[0] for n, _ in m.objective} == {"zp", "zpq"}
    for v in m.variables:
        if v.kind == BINARY:
            assert (v.lower, v.upper) == (0.0, 1.0)
        elif not v.name.startswith("pl_"):
            assert v.lower == 0.0


def test_negative_coordinates_rejected():
    with pytest.raises(NegativeCoordinateError, match="shift required"):
        build_model(PointSet.from_rows([(-1.0, 2.0)]), PointSet.from_rows([(0.0, 1.0)]))


def test_golden_file():
    golden = (FIXTURES / "toy_1x1x1.lp").read_text()
    assert export_lp(toy()) == golden
    assert parse_lp(golden) == toy()


def test_export_is_deterministic(worked_p, worked_q):
    assert export_lp(build_model(worked_p, worked_q)) == export_lp(build_model(worked_p, worked_q))


def test_round_trip_random_models():
    rng = np.random.default_rng(32)
    for _ in range(50):
        p, q = random_pair(rng, 4, 4)
        m = build_model(p, q, preprocess=False)
        text = export_lp(m)
        back = parse_lp(text)
        assert back == m
        assert export_lp(back) == text


@pytest.mark.parametrize(
    "text, line",
    [
        ("", 1),
        ("Minimize\n obj: x\nSubject To\n c1: x >=\nEnd\n", 4),
        ("Minimize\n obj: x y\nBounds\n x >= 0\n y >= 0\nEnd\n", 2),
        ("Minimize\n obj: x\nBounds\n x >= zero\nEnd\n", 4),
        ("Minimize\n obj: x\nBounds\n x >= 0\n", 4),
        ("garbage\n", 1),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(LPParseError) as info:
        parse_lp(text)
    assert info.value.line == line


def test_toy_optimum():
    res = solve_model(toy())
    assert res.status == "optimal"
    assert res.objective == pytest.approx(1.0, abs=1e-9)


def test_worked_example_optimum(worked_p, worked_q):
    m = build_model(worked_p, worked_q)
    res = solve_model(m)
    assert res.status == "optimal"
    assert res.objective == pytest.approx(1.5, abs=1e-7)
    a = assignment_from_solution(m, res.values)
    assert evaluate_assignment(worked_p, worked_q, a).value == pytest.approx(1.5, abs=1e-9)


def test_verbatim_big_m_is_infeasible(worked_p, worked_q):
    m = build_model(worked_p, worked_q, big_m_form="verbatim")
    assert solve_model(m).status == "infeasible"
    # the optimal certificate cannot be completed under the verbatim coefficient
    assert violations(m, feasible_point(m, [1, 1, 1]))


def test_certificate_extends_to_feasible_point():
    rng = np.random.default_rng(33)
    for _ in range(100):
        p, q = random_pair(rng, 4, 4, dims=(1, 2, 3))
        m = build_model(p, q, preprocess=False)
        cert, _ = solve_bb(p, q, None)
        vals = feasible_point(m, cert.assignment)
        assert violations(m, vals) == []
        assert objective_value(m, vals) == pytest.approx(cert.value, abs=1e-9)


def test_integral_points_never_beat_the_optimum():
    rng = np.random.default_rng(34)
    for _ in range(50):
        p, q = random_pair(rng, 4, 4, dims=(2, 3))
        m = build_model(p, q, preprocess=False)
        best = solve_bb(p, q)[0].value
        for _ in range(10):
            a = rng.integers(0, len(p), len(q))
            vals = feasible_point(m, a)
            assert violations(m, vals) == []
            assert objective_value(m, vals) >= best - 1e-9


def test_model_optimum_matches_bb():
    rng = np.random.default_rng(35)
    for _ in range(30):
        p, q = random_pair(rng, 4, 4, dims=(2, 3))
        try:
            m = build_model(p, q)
        except Exception:
            continue  # everything dominated; nothing to model
        res = solve_model(m)
        assert res.status == "optimal"
        assert res.objective == pytest.approx(solve_bb(p, q)[0].value, abs=1e-6)
