"""Exact dominance move between two point sets, for any number of objectives.

For a fixed assignment of Q-points to P-points, the cheapest L1 move of each
P-point is the componentwise minimum over its group, so the problem reduces
to a search over assignments. Two exact searches live here: an exhaustive
enumeration used as an oracle, and a depth-first branch-and-bound.
"""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from dommove.errors import DimensionMismatchError, EmptySetError, InstanceTooLargeError
from dommove.geometry import PointSet, reduce_instance

log = logging.getLogger(__name__)

DEFAULT_ORACLE_CAP = 10**7
DEFAULT_NODE_CAP = 10**7
DEFAULT_TIME_CAP = 300.0


def _tol(value: float) -> float:
    return 1e-9 * max(1.0, abs(value))


@dataclass(frozen=True)
class DomCertificate:
    """A feasibility witness for a dominance move value.

    ``assignment[j]`` is the index of the P-point that covers ``q[j]``.
    ``moved_points`` and ``per_group_cost`` are keyed by the P-indices that
    cover at least one Q-point.
    """

    value: float
    assignment: tuple[int, ...]
    moved_points: dict[int, tuple[float, ...]] = field(default_factory=dict)
    per_group_cost: dict[int, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "assignment": list(self.assignment),
            "moved_points": {str(i): list(v) for i, v in sorted(self.moved_points.items())},
            "per_group_cost": {str(i): c for i, c in sorted(self.per_group_cost.items())},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DomCertificate":
        return cls(
            value=float(d["value"]),
            assignment=tuple(int(a) for a in d["assignment"]),
            moved_points={int(k): tuple(float(x) for x in v) for k, v in d["moved_points"].items()},
            per_group_cost={int(k): float(v) for k, v in d["per_group_cost"].items()},
        )


@dataclass
class SolveStats:
    """Search statistics. ``optimal`` is False when a cap stopped the search;
    ``lower_bound`` is then a proven bound on the true value."""

    nodes_explored: int = 0
    incumbent_updates: int = 0
    pruned: int = 0
    wall_time: float = 0.0
    optimal: bool = True
    lower_bound: float = 0.0

    def to_dict(self, wall_time: bool = True) -> dict:
        d = asdict(self)
        if not wall_time:
            d.pop("wall_time")
        return d


@dataclass(frozen=True)
class SolveOptions:
    node_cap: int = DEFAULT_NODE_CAP
    time_cap: float = DEFAULT_TIME_CAP
    preprocess: bool = True
    # second pass that picks the lexicographically smallest optimal assignment
    canonical: bool = True

    def __post_init__(self) -> None:
        if self.node_cap <= 0 or self.time_cap <= 0:
            raise ValueError("caps must be positive")


def _check_pair(p: PointSet, q: PointSet) -> None:
    if p.dim != q.dim:
        raise DimensionMismatchError(f"dimension mismatch: {p.label!r} has {p.dim}, {q.label!r} has {q.dim}")
    if len(p) == 0:
        raise EmptySetError("empty dominating set")


def evaluate_assignment(p: PointSet, q: PointSet, assignment: Sequence[int]) -> DomCertificate:
    """Certificate for a fixed q -> p assignment with optimal moves."""
    _check_pair(p, q)
    assignment = tuple(int(a) for a in assignment)
    if len(assignment) != len(q):
        raise ValueError(f"assignment has {len(assignment)} entries for {len(q)} points")
    if any(a < 0 or a >= len(p) for a in assignment):
        raise IndexError("assignment index out of range")
    moved: dict[int, tuple[float, ...]] = {}
    costs: dict[int, float] = {}
    arr = np.asarray(assignment)
    for i in sorted(set(assignment)):
        m = np.minimum(p.points[i], q.points[arr == i].min(axis=0))
        moved[i] = tuple(float(x) for x in m)
        costs[i] = float(np.sum(p.points[i] - m))
    return DomCertificate(sum(costs.values()), assignment, moved, costs)


def _lift(p: PointSet, q: PointSet, p_kept: Sequence[int], q_kept: Sequence[int],
          reduced_assignment: Sequence[int]) -> DomCertificate:
    """Extend an assignment of the reduced instance to every original q.

    A dropped q goes to the lowest-index P-point whose final position already
    weakly dominates it, which leaves every group cost unchanged.
    """
    full = [-1] * len(q)
    for jr, ir in zip(q_kept, reduced_assignment):
        full[jr] = p_kept[ir]
    pos = p.points.copy()
    if q_kept:
        for i in set(full) - {-1}:
            members = [j for j in q_kept if full[j] == i]
            pos[i] = np.minimum(pos[i], q.points[members].min(axis=0))
    for j in range(len(q)):
        if full[j] == -1:
            cover = np.flatnonzero(np.all(pos <= q.points[j], axis=1))
            full[j] = int(cover[0])
    return evaluate_assignment(p, q, full)


def _assignment_costs(P: np.ndarray, Q: np.ndarray, A: np.ndarray) -> np.ndarray:
    """Total cost of each assignment row in ``A`` (shape ``(k, NQ)``)."""
    total = np.zeros(A.shape[0])
    for i in range(P.shape[0]):
        mask = A == i
        mins = np.where(mask[:, :, None], Q[None, :, :], np.inf).min(axis=1)
        used = mask.any(axis=1)
        c = np.maximum(0.0, P[i][None, :] - np.minimum(mins, P[i][None, :])).sum(axis=1)
        total += np.where(used, c, 0.0)
    return total


def solve_bruteforce(p: PointSet, q: PointSet, cap: int = DEFAULT_ORACLE_CAP,
                     preprocess: bool = True) -> DomCertificate:
    """Exhaustive oracle: evaluate every assignment of Q-points to P-points.

    Among optimal assignments the lexicographically smallest one is returned
    (indices of the reduced instance, which preserve the input order).
    """
    _check_pair(p, q)
    if preprocess:
        red = reduce_instance(p, q)
        p_kept, q_kept = red.p_kept, red.q_kept
    else:
        p_kept, q_kept = tuple(range(len(p))), tuple(range(len(q)))
    P, Q = p.points[list(p_kept)], q.points[list(q_kept)]
    NP, NQ = len(P), len(Q)
    if NQ == 0:
        return _lift(p, q, p_kept, q_kept, [])
    if NP**NQ > cap:
        raise InstanceTooLargeError(f"instance too large for oracle: {NP}^{NQ} assignments > cap {cap}")
    total = NP**NQ
    powers = NP ** np.arange(NQ - 1, -1, -1)
    best_val, best_code = np.inf, -1
    values = np.empty(total)
    step = max(1, 200_000 // max(1, NQ * NP))
    for start in range(0, total, step):
        codes = np.arange(start, min(total, start + step))
        A = (codes[:, None] // powers[None, :]) % NP
        values[start : start + len(codes)] = _assignment_costs(P, Q, A)
    best_val = float(values.min())
    best_code = int(np.flatnonzero(values <= best_val + _tol(best_val))[0])
    assignment = [(best_code // int(pw)) % NP for pw in powers]
    return _lift(p, q, p_kept, q_kept, assignment)


class _CapHit(Exception):
    pass


class _Search:
    """Depth-first branch-and-bound over q -> p assignments on raw arrays."""

    def __init__(self, P: np.ndarray, Q: np.ndarray, node_cap: int, deadline: float):
        self.P, self.Q = P, Q
        self.node_cap, self.deadline = node_cap, deadline
        self.stats = SolveStats()
        self.moved = P.copy()
        self.capped = False
        self.open_bound = np.inf

    # the completion bound: every unassigned q lands in some group i and pays at
    # least max(0, moved[i, m] - q[m]) in each coordinate; coordinates are
    # attributed to the unassigned q holding their minimum so no cost is counted twice
    def completion_bound(self, rest: np.ndarray) -> float:
        if len(rest) == 0:
            return 0.0
        QU = self.Q[rest]
        d = np.maximum(0.0, self.moved[None, :, :] - QU[:, None, :])
        by_point = float(d.sum(axis=2).min(axis=1).max())
        owner = QU.argmin(axis=0)
        by_coord = 0.0
        for u in np.unique(owner):
            by_coord += float(d[u][:, owner == u].sum(axis=1).min())
        return max(by_point, by_coord)

    def _tick(self) -> None:
        self.stats.nodes_explored += 1
        if self.stats.nodes_explored >= self.node_cap or (
            self.stats.nodes_explored % 256 == 0 and time.perf_counter() > self.deadline
        ):
            raise _CapHit

    def optimize(self, order: np.ndarray, incumbent: float, assignment: list[int]) -> tuple[float, list[int]]:
        self.order = order
        self.best, self.best_assign = incumbent, list(assignment)
        self.current = [-1] * len(self.Q)
        self.stats.incumbent_updates = 1
        try:
            self._tick()
            root = self.completion_bound(order)
            self.stats.lower_bound = root
            if root < self.best - _tol(self.best):
                self._descend(0, 0.0)
        except _CapHit:
            self.capped = True
        if self.capped:
            self.stats.optimal = False
            self.stats.lower_bound = min(self.best, self.open_bound)
        else:
            self.stats.lower_bound = self.best
        return self.best, self.best_assign

    def _descend(self, depth: int, cost: float) -> None:
        """Search below a node; on a cap hit, record bounds of the unexplored part."""
        NQ = len(self.Q)
        if depth == NQ:
            if cost < self.best - _tol(self.best):
                self.best, self.best_assign = cost, list(self.current)
                self.stats.incumbent_updates += 1
            return
        j = self.order[depth]
        rest = self.order[depth + 1 :]
        inc = np.maximum(0.0, self.moved - self.Q[j]).sum(axis=1)
        children = np.argsort(inc, kind="stable")
        interrupted = False
        for pos, i in enumerate(children):
            c2 = cost + inc[i]
            if interrupted:
                if c2 < self.best:
                    self._record_open(i, j, c2, rest)
                continue
            if c2 >= self.best - _tol(self.best):
                self.stats.pruned += len(children) - pos
                break
            saved = self.moved[i].copy()
            np.minimum(self.moved[i], self.Q[j], out=self.moved[i])
            self.current[j] = int(i)
            try:
                bound = c2 + self.completion_bound(rest)
                if bound < self.best - _tol(self.best):
                    try:
                        self._tick()
                        self._descend(depth + 1, c2)
                    except _CapHit:
                        self.open_bound = min(self.open_bound, bound)
                        interrupted = True
                else:
                    self.stats.pruned += 1
            finally:
                self.moved[i] = saved
                self.current[j] = -1
        if interrupted:
            raise _CapHit

    def _record_open(self, i: int, j: int, c2: float, rest: np.ndarray) -> None:
        saved = self.moved[i].copy()
        np.minimum(self.moved[i], self.Q[j], out=self.moved[i])
        self.open_bound = min(self.open_bound, c2 + self.completion_bound(rest))
        self.moved[i] = saved

    def first_within(self, target: float) -> list[int] | None:
        """Lexicographically smallest assignment with cost <= target (+tol)."""
        self.current = [-1] * len(self.Q)
        limit = target + _tol(target)
        try:
            return self._lex(0, 0.0, limit)
        except _CapHit:
            return None

    def _lex(self, j: int, cost: float, limit: float) -> list[int] | None:
        NQ = len(self.Q)
        if j == NQ:
            return list(self.current) if cost <= limit else None
        rest = np.arange(j + 1, NQ)
        inc = np.maximum(0.0, self.moved - self.Q[j]).sum(axis=1)
        for i in range(len(self.P)):
            c2 = cost + inc[i]
            if c2 > limit:
                continue
            saved = self.moved[i].copy()
            np.minimum(self.moved[i], self.Q[j], out=self.moved[i])
            self.current[j] = i
            try:
                if c2 + self.completion_bound(rest) <= limit:
                    self._tick()
                    found = self._lex(j + 1, c2, limit)
                    if found is not None:
                        return found
            finally:
                self.moved[i] = saved
                self.current[j] = -1
        return None


def _total_cost(P: np.ndarray, Q: np.ndarray, a: Sequence[int]) -> float:
    a = np.asarray(a)
    total = 0.0
    for i in np.unique(a):
        total += float(np.maximum(0.0, P[i] - Q[a == i].min(axis=0)).sum())
    return total


def _local_search(P: np.ndarray, Q: np.ndarray, a: list[int], max_passes: int = 50) -> tuple[float, list[int]]:
    """Move single q's between groups while that strictly lowers the cost."""
    a = list(a)
    NQ = len(Q)
    value = _total_cost(P, Q, a)
    for _ in range(max_passes):
        improved = False
        for j in range(NQ):
            arr = np.asarray(a)
            pos = P.copy()
            for i in np.unique(arr):
                pos[i] = np.minimum(P[i], Q[arr == i].min(axis=0))
            home = a[j]
            others = (arr == home) & (np.arange(NQ) != j)
            without = np.minimum(P[home], Q[others].min(axis=0)) if others.any() else P[home]
            saving = float(np.sum(without - pos[home]))
            gain = np.maximum(0.0, pos - Q[j]).sum(axis=1)
            gain[home] = np.inf
            i = int(np.argmin(gain))
            if gain[i] < saving - _tol(value):
                a[j] = i
                value = _total_cost(P, Q, a)
                improved = True
        if not improved:
            break
    return value, a


def _initial_incumbent(P: np.ndarray, Q: np.ndarray, single: np.ndarray) -> tuple[float, list[int]]:
    greedy = [int(k) for k in single.argmin(axis=1)]
    one = int(np.argmin(np.maximum(0.0, P - Q.min(axis=0)).sum(axis=1)))
    best = (np.inf, greedy)
    for start in (greedy, [one] * len(Q)):
        cand = _local_search(P, Q, start)
        if cand[0] < best[0]:
            best = cand
    return best


def solve_bb(p: PointSet, q: PointSet, opts: SolveOptions | None = None) -> tuple[DomCertificate, SolveStats]:
    """Exact dominance move DoM(p, q) by branch-and-bound.

    Q-points are branched in order of decreasing cheapest single-point cost,
    children in order of increasing incremental cost. A node is pruned when
    the cost of the groups formed so far plus a completion bound reaches the
    incumbent. If a node or time cap stops the search, the best incumbent is
    returned with ``stats.optimal = False``.
    """
    opts = opts or SolveOptions()
    _check_pair(p, q)
    t0 = time.perf_counter()
    if opts.preprocess:
        red = reduce_instance(p, q)
        p_kept, q_kept = red.p_kept, red.q_kept
    else:
        p_kept, q_kept = tuple(range(len(p))), tuple(range(len(q)))
    P, Q = p.points[list(p_kept)], q.points[list(q_kept)]
    if len(Q) == 0:
        cert = _lift(p, q, p_kept, q_kept, [])
        return cert, SolveStats(wall_time=time.perf_counter() - t0)

    single = np.maximum(0.0, P[None, :, :] - Q[:, None, :]).sum(axis=2)
    order = np.argsort(-single.min(axis=1), kind="stable")
    value, assignment = _initial_incumbent(P, Q, single)
    search = _Search(P, Q, opts.node_cap, t0 + opts.time_cap)
    value, assignment = search.optimize(order, value, assignment)
    stats = search.stats
    if stats.optimal and opts.canonical:
        lex = search.first_within(value)
        if lex is not None:
            assignment = lex
    if not stats.optimal:
        log.warning("search cap hit after %d nodes; returning incumbent %.6g (bound %.6g)",
                    stats.nodes_explored, value, stats.lower_bound)
    cert = _lift(p, q, p_kept, q_kept, assignment)
    stats.wall_time = time.perf_counter() - t0
    if stats.optimal:
        stats.lower_bound = cert.value
    return cert, stats


def verify_certificate(p: PointSet, q: PointSet, cert: DomCertificate, tol: float = 1e-9) -> bool:
    """Check feasibility and value of ``cert`` (not its optimality)."""
    _check_pair(p, q)
    if len(cert.assignment) != len(q):
        return False
    for i in list(cert.assignment) + list(cert.moved_points) + list(cert.per_group_cost):
        if not 0 <= i < len(p):
            raise IndexError(f"certificate index {i} out of range")
    used = set(cert.assignment)
    if set(cert.moved_points) != used or set(cert.per_group_cost) != used:
        return False
    arr = np.asarray(cert.assignment, dtype=int)
    lbp = np.minimum(p.points, q.points.min(axis=0)) if len(q) else p.points
    total = 0.0
    for i in used:
        moved = np.asarray(cert.moved_points[i], dtype=float)
        if moved.shape != (p.dim,):
            return False
        group = q.points[arr == i]
        if not np.all(moved[None, :] <= group):
            return False
        expected = np.minimum(p.points[i], group.min(axis=0))
        if not np.allclose(moved, expected, rtol=0.0, atol=tol):
            return False
        if np.any(moved < lbp[i] - tol) or np.any(moved > p.points[i] + tol):
            return False
        cost = float(np.sum(p.points[i] - expected))
        if abs(cert.per_group_cost[i] - cost) > tol * max(1.0, cost):
            return False
        total += cost
    if abs(sum(cert.per_group_cost.values()) - cert.value) > tol * max(1.0, total):
        return False
    return abs(cert.value - total) <= tol * max(1.0, total)


def dominance_move(p: PointSet, q: PointSet, method: str = "bb") -> float:
    """DoM(p, q) as a float; ``method`` is ``bb``, ``bruteforce`` or ``biobjective``."""
    if method == "bb":
        cert, stats = solve_bb(p, q)
        return cert.value
    if method == "bruteforce":
        return solve_bruteforce(p, q).value
    if method == "biobjective":
        from dommove.biobjective import dom_biobjective

        return dom_biobjective(p, q).value
    raise ValueError(f"unknown method {method!r}")
