"""Regenerate the biobjective facet fixtures in ``facets/``.

All sets lie on (or just off) the linear front f2 = 1 - f1, f1 in [0, 1].
Each case is a pair P, Q; ``PREFERRED`` names the set a facet-aware
indicator should favour, i.e. the one with the smaller move to dominate the other.

    convergence_1  Q: 10 evenly spaced points; P: Q with f1 lowered by 0.05
    convergence_2  P: 10 evenly spaced points; Q: P with every other point worsened by 0.05
    cardinality_1  P: 10 evenly spaced points; Q: 11 evenly spaced points
    cardinality_2  P: 12 evenly spaced points; Q: 10 evenly spaced points
    uniformity_1   P: 10 evenly spaced; Q: both ends plus 8 uniform random (seed 2024)
    uniformity_2   P: 10 evenly spaced; Q: both ends, gaps growing by a factor 1.3
    spread_1       P: 10 evenly spaced; Q: P shrunk by 0.8 about the middle
    spread_2       P: 10 evenly spaced; Q: 5 evenly spaced points with f1 in [0.6, 1]

Run ``python3 tests/fixtures/make_facets.py`` from the repository root.
"""

from pathlib import Path

import numpy as np

from dommove import PointSet
from dommove.io import write_pointset

OUT = Path(__file__).parent / "facets"

PREFERRED = {
    "convergence_1": "P",
    "convergence_2": "P",
    "cardinality_1": "Q",
    "cardinality_2": "P",
    "uniformity_1": "P",
    "uniformity_2": "P",
    "spread_1": "P",
    "spread_2": "P",
}


def front(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return np.column_stack([t, 1.0 - t])


def build() -> dict[str, tuple[np.ndarray, np.ndarray]]:
    rng = np.random.default_rng(2024)
    even = np.linspace(0.0, 1.0, 10)
    cases = {}
    q = front(even)
    p = q.copy()
    p[:, 0] -= 0.05
    cases["convergence_1"] = (p, q)
    q = front(even)
    q[::2] += 0.05
    cases["convergence_2"] = (front(even), q)
    cases["cardinality_1"] = (front(even), front(np.linspace(0.0, 1.0, 11)))
    cases["cardinality_2"] = (front(np.linspace(0.0, 1.0, 12)), front(even))
    cases["uniformity_1"] = (front(even), front(np.sort(np.concatenate([[0.0, 1.0], rng.uniform(0, 1, 8)]))))
    gaps = np.cumsum(1.3 ** np.arange(9))
    cases["uniformity_2"] = (front(even), front(np.concatenate([[0.0], gaps / gaps[-1]])))
    cases["spread_1"] = (front(even), front(0.5 + 0.8 * (even - 0.5)))
    cases["spread_2"] = (front(even), front(np.linspace(0.6, 1.0, 5)))
    return cases


def main() -> None:
    OUT.mkdir(exist_ok=True)
    for name, (p, q) in build().items():
        write_pointset(PointSet(p), OUT / f"{name}_P.csv")
        write_pointset(PointSet(q), OUT / f"{name}_Q.csv")


if __name__ == "__main__":
    main()
