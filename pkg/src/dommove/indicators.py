"""Unary companion indicators: inverted generational distance and hypervolume."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from dommove.errors import DimensionMismatchError, EmptySetError
from dommove.geometry import ArrayLike, PointSet, as_point, pareto_indices


def igd(ref: PointSet, p: PointSet) -> float:
    """Mean Euclidean distance from each reference point to its nearest point of ``p``."""
    if len(ref) == 0 or len(p) == 0:
        raise EmptySetError("IGD needs a non-empty reference set and solution set")
    if ref.dim != p.dim:
        raise DimensionMismatchError(f"dimension mismatch: {ref.dim} vs {p.dim}")
    diff = ref.points[:, None, :] - p.points[None, :, :]
    return float(np.sqrt((diff**2).sum(axis=2)).min(axis=1).mean())


def _box(p: np.ndarray, ref: np.ndarray) -> float:
    return float(np.prod(ref - p))


def _hv2d(pts: np.ndarray, ref: np.ndarray) -> float:
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
    vol, y_hi = 0.0, ref[1]
    for x, y in pts:
        if y < y_hi:
            vol += (ref[0] - x) * (y_hi - y)
            y_hi = y
    return vol


def _wfg(pts: np.ndarray, ref: np.ndarray) -> float:
    """Volume dominated by ``pts`` (all strictly better than ``ref``)."""
    n, d = pts.shape
    if n == 0:
        return 0.0
    if n == 1:
        return _box(pts[0], ref)
    if d == 1:
        return float(ref[0] - pts[:, 0].min())
    if d == 2:
        return _hv2d(pts, ref)
    # sweep along the last objective; each point contributes its exclusive slab
    pts = pts[np.argsort(pts[:, -1], kind="stable")[::-1]]
    vol = 0.0
    for k in range(n):
        vol += _exclusive(pts[k], pts[k + 1 :], ref)
    return vol


def _exclusive(p: np.ndarray, rest: np.ndarray, ref: np.ndarray) -> float:
    v = _box(p, ref)
    if len(rest) == 0:
        return v
    limited = np.maximum(rest, p[None, :])
    limited = limited[pareto_indices(limited)]
    return v - _wfg(limited, ref)


def hypervolume(p: PointSet, ref: ArrayLike) -> float:
    """Lebesgue measure of the union of boxes ``[x, ref]`` over ``x`` in ``p``.

    Points that do not strictly dominate ``ref`` contribute nothing; if no
    point does, the result is 0.
    """
    r = as_point(ref)
    if len(r) != p.dim:
        raise DimensionMismatchError(f"dimension mismatch: ref has {len(r)}, set has {p.dim}")
    if len(p) == 0:
        return 0.0
    pts = p.points[np.all(p.points < r[None, :], axis=1)]
    if len(pts) == 0:
        return 0.0
    pts = pts[pareto_indices(pts)]
    return float(_wfg(pts, r))


def auto_reference_point(sets: Sequence[PointSet]) -> np.ndarray:
    """Componentwise maximum over all points of all sets."""
    return np.vstack([s.points for s in sets]).max(axis=0)


def auto_reference_set(sets: Sequence[PointSet]) -> PointSet:
    """Single-point reference set at the componentwise minimum of all sets."""
    ideal = np.vstack([s.points for s in sets]).min(axis=0)
    return PointSet(ideal[None, :], "auto-ref")
