"""Objective-space point sets, Pareto dominance and the group move cost.

All objectives are minimized. Coordinate comparisons are exact: no epsilon
is applied anywhere in this module, since a tolerance would silently change
the dominance relation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from dommove.errors import DimensionMismatchError, DomError, EmptySetError

ArrayLike = Sequence[float] | np.ndarray


def as_point(x: ArrayLike) -> np.ndarray:
    """Convert ``x`` to a finite 1-D float array."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise DomError(f"a point must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomError("point coordinates must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class PointSet:
    """An ordered, labeled collection of objective vectors.

    ``points`` is stored as a read-only ``(n, dim)`` float array. Duplicates
    are legal. An empty set still carries its dimension.
    """

    points: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        arr = np.array(self.points, dtype=float)
        if arr.ndim != 2:
            raise DomError(f"points must be a 2-D array, got shape {arr.shape}")
        if arr.shape[1] < 1:
            raise DomError("dimension must be positive")
        if not np.all(np.isfinite(arr)):
            raise DomError(f"set {self.label!r} contains NaN or infinite coordinates")
        arr.setflags(write=False)
        object.__setattr__(self, "points", arr)

    @classmethod
    def from_rows(
        cls, rows: Iterable[ArrayLike], label: str = "", dim: int | None = None
    ) -> "PointSet":
        rows = [list(np.asarray(r, dtype=float)) for r in rows]
        if not rows:
            if dim is None:
                raise DomError("dimension of an empty set must be given")
            return cls(np.empty((0, dim)), label)
        lengths = {len(r) for r in rows}
        if len(lengths) != 1:
            raise DimensionMismatchError(f"ragged rows in set {label!r}: lengths {sorted(lengths)}")
        if dim is not None and lengths != {dim}:
            raise DimensionMismatchError(f"expected dimension {dim}, got {lengths.pop()}")
        return cls(np.array(rows), label)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, idx: int) -> np.ndarray:
        return self.points[idx]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.label == other.label and np.array_equal(self.points, other.points)

    def __repr__(self) -> str:
        return f"PointSet(label={self.label!r}, n={len(self)}, dim={self.dim})"

    def subset(self, indices: Sequence[int]) -> "PointSet":
        idx = np.asarray(indices, dtype=int)
        return PointSet(self.points[idx].reshape(len(idx), self.dim), self.label)

    def with_label(self, label: str) -> "PointSet":
        return PointSet(self.points, label)

    def translated(self, t: ArrayLike) -> "PointSet":
        return PointSet(self.points + as_point(t), self.label)

    def scaled(self, s: float) -> "PointSet":
        return PointSet(self.points * float(s), self.label)

    def with_point(self, x: ArrayLike) -> "PointSet":
        """Return a copy with ``x`` appended."""
        x = as_point(x)
        _check_dim(self.dim, len(x))
        return PointSet(np.vstack([self.points, x[None, :]]), self.label)


def _check_dim(a: int, b: int) -> None:
    if a != b:
        raise DimensionMismatchError(f"dimension mismatch: {a} vs {b}")


def weakly_dominates(p: ArrayLike, q: ArrayLike) -> bool:
    """True iff ``p[m] <= q[m]`` for every objective ``m``."""
    p, q = as_point(p), as_point(q)
    _check_dim(len(p), len(q))
    return bool(np.all(p <= q))


def dominates(p: ArrayLike, q: ArrayLike) -> bool:
    """Pareto dominance: weakly dominates and strictly better somewhere."""
    p, q = as_point(p), as_point(q)
    _check_dim(len(p), len(q))
    return bool(np.all(p <= q) and np.any(p < q))


def pareto_indices(points: np.ndarray, chunk: int = 512) -> list[int]:
    """Indices of the non-dominated rows of ``points``, in input order.

    A row is dropped when another row dominates it, or when it duplicates an
    earlier row (the first copy is kept).
    """
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    keep: list[int] = []
    idx = np.arange(n)
    for start in range(0, n, chunk):
        block = pts[start : start + chunk]
        # leq[a, k]: row k weakly dominates block row a
        leq = np.all(pts[None, :, :] <= block[:, None, :], axis=2)
        lt = np.any(pts[None, :, :] < block[:, None, :], axis=2)
        earlier = idx[None, :] < (start + np.arange(len(block)))[:, None]
        beaten = leq & (lt | earlier)
        keep.extend(int(start + a) for a in np.flatnonzero(~beaten.any(axis=1)))
    return keep


def pareto_filter(s: PointSet) -> PointSet:
    """Remove dominated points (and later duplicates) from ``s``."""
    if len(s) == 0:
        return s
    return s.subset(pareto_indices(s.points))


@dataclass(frozen=True, eq=False)
class ReducedInstance:
    """A preprocessed (P, Q) pair with index maps back to the inputs.

    ``p_kept``/``q_kept`` index into the original sets; ``p_set``/``q_set``
    hold the surviving points in the same order.
    """

    p_kept: tuple[int, ...]
    q_kept: tuple[int, ...]
    p_set: PointSet
    q_set: PointSet


def reduce_instance(p: PointSet, q: PointSet) -> ReducedInstance:
    """Pareto-filter both sets, then drop every q weakly dominated by a kept p.

    The dominance move value of the reduced pair equals that of the input.
    """
    _check_dim(p.dim, q.dim)
    if len(p) == 0:
        raise EmptySetError("empty dominating set")
    p_kept = pareto_indices(p.points)
    q_kept = pareto_indices(q.points) if len(q) else []
    if q_kept:
        kp = p.points[p_kept]
        qq = q.points[q_kept]
        covered = np.all(kp[None, :, :] <= qq[:, None, :], axis=2).any(axis=1)
        q_kept = [j for j, c in zip(q_kept, covered) if not c]
    return ReducedInstance(
        p_kept=tuple(p_kept),
        q_kept=tuple(q_kept),
        p_set=p.subset(p_kept),
        q_set=q.subset(q_kept),
    )


def group_cost(p: ArrayLike, g: Iterable[ArrayLike] | np.ndarray | PointSet) -> tuple[float, np.ndarray]:
    """L1 cost of moving ``p`` (decrease-only) until it weakly dominates all of ``g``.

    Returns ``(cost, moved)`` where ``moved[m] = min(p[m], min_q q[m])``.
    An empty group costs nothing and leaves ``p`` in place.
    """
    p = as_point(p)
    if isinstance(g, PointSet):
        arr = g.points
    else:
        arr = np.asarray(list(g) if not isinstance(g, np.ndarray) else g, dtype=float)
    if arr.size == 0:
        return 0.0, p.copy()
    arr = arr.reshape(-1, arr.shape[-1])
    _check_dim(len(p), arr.shape[1])
    moved = np.minimum(p, arr.min(axis=0))
    return float(np.sum(p - moved)), moved
