"""The grouping algorithm for biobjective dominance move.

After the usual reduction, every Q-point starts as its own group and points
at its inward neighbor in R = P u Q (the point of R that is cheapest to move
onto it). Pointers into Q merge groups, pointers into P attach a
representative. Mutual neighbors form a loop; each loop is replaced by its
ideal point and the pointers are recomputed until no loop is left.
"""

from __future__ import annotations

import numpy as np

from dommove.errors import DegenerateInstanceError, DimensionMismatchError, DomError, EmptySetError
from dommove.geometry import ArrayLike, PointSet, as_point, reduce_instance
from dommove.solver import DomCertificate, _lift


def _move_costs(R: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.maximum(0.0, R - q[None, :]).sum(axis=1)


def inward_neighbor(q: ArrayLike, r_union: PointSet, exclude: int | None = None) -> int:
    """Index of the point of ``r_union`` (other than ``q``) cheapest to move onto ``q``.

    ``q`` itself is identified by ``exclude`` or, failing that, by its first
    exact occurrence in ``r_union``. Ties go to the lowest index.
    """
    q = as_point(q)
    if len(q) != r_union.dim:
        raise DimensionMismatchError(f"dimension mismatch: {len(q)} vs {r_union.dim}")
    if exclude is None:
        hits = np.flatnonzero(np.all(r_union.points == q, axis=1))
        if len(hits) == 0:
            raise DomError("q must belong to r_union")
        exclude = int(hits[0])
    if len(r_union) < 2:
        raise DegenerateInstanceError("degenerate instance: no candidate neighbor")
    costs = _move_costs(r_union.points, q)
    costs[exclude] = np.inf
    return int(np.argmin(costs))


class _DisjointSets:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _neighbors(P: np.ndarray, nodes: list[np.ndarray]) -> list[int]:
    """Inward neighbor of every working node; indices < len(P) are P-points."""
    R = np.vstack([P] + [n[None, :] for n in nodes])
    NP = len(P)
    out = []
    for k, w in enumerate(nodes):
        costs = _move_costs(R, w)
        costs[NP + k] = np.inf
        out.append(int(np.argmin(costs)))
    return out


def _group(P: np.ndarray, Q: np.ndarray) -> list[int]:
    """Assignment (reduced indices) produced by the grouping procedure."""
    NP = len(P)
    nodes = [q.copy() for q in Q]
    members = [[j] for j in range(len(Q))]
    while True:
        nb = _neighbors(P, nodes)
        loops = []
        for k, r in enumerate(nb):
            if r >= NP and nb[r - NP] == NP + k and k < r - NP:
                loops.append((k, r - NP))
        if not loops:
            break
        # each loop shrinks the node count by one, so this terminates
        merged = {k for pair in loops for k in pair}
        new_nodes = [n for k, n in enumerate(nodes) if k not in merged]
        new_members = [m for k, m in enumerate(members) if k not in merged]
        for a, b in loops:
            new_nodes.append(np.minimum(nodes[a], nodes[b]))
            new_members.append(members[a] + members[b])
        nodes, members = new_nodes, new_members

    dsu = _DisjointSets(len(nodes))
    for k, r in enumerate(nb):
        if r >= NP:
            dsu.union(k, r - NP)
    rep: dict[int, int] = {}
    for k, r in enumerate(nb):
        if r < NP:
            rep[dsu.find(k)] = r
    comps: dict[int, list[int]] = {}
    for k in range(len(nodes)):
        comps.setdefault(dsu.find(k), []).extend(members[k])

    assignment = [-1] * len(Q)
    for root, qs in comps.items():
        if root in rep:
            i = rep[root]
        else:
            # a pointer cycle longer than two never reaches P; use the cheapest P-point
            low = Q[qs].min(axis=0)
            i = int(np.argmin(np.maximum(0.0, P - low[None, :]).sum(axis=1)))
        for j in qs:
            assignment[j] = i
    return assignment


def dom_biobjective(p: PointSet, q: PointSet) -> DomCertificate:
    """Dominance move DoM(p, q) for two objectives via the grouping algorithm."""
    if p.dim != 2 or q.dim != 2:
        raise DomError("biobjective only: both sets must have exactly 2 objectives")
    if len(p) == 0:
        raise EmptySetError("empty dominating set")
    red = reduce_instance(p, q)
    P, Q = red.p_set.points, red.q_set.points
    assignment = _group(P, Q) if len(Q) else []
    return _lift(p, q, red.p_kept, red.q_kept, assignment)
