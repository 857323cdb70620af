"""Pairwise dominance move matrices over a family of labeled sets."""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from dommove.biobjective import dom_biobjective
from dommove.errors import DimensionMismatchError, DomError
from dommove.geometry import PointSet
from dommove.solver import DomCertificate, SolveOptions, SolveStats, evaluate_assignment, solve_bb

log = logging.getLogger(__name__)

OPTIMAL = "optimal"
INCOMPLETE = "incomplete"


@dataclass(frozen=True)
class RunConfig:
    preprocess: bool = True
    shift: bool = True
    node_cap: int = 10**7
    time_cap: float = 300.0
    jobs: int = 1
    output_format: str = "text"
    cross_check: bool = False

    def __post_init__(self) -> None:
        if self.node_cap <= 0 or self.time_cap <= 0 or self.jobs <= 0:
            raise ValueError("caps and jobs must be positive")
        if self.output_format not in ("text", "csv", "json"):
            raise ValueError(f"unknown output format {self.output_format!r}")

    def solve_options(self) -> SolveOptions:
        return SolveOptions(node_cap=self.node_cap, time_cap=self.time_cap, preprocess=self.preprocess)


@dataclass
class ComparisonMatrix:
    """``values[i][j]`` is DoM(set_i, set_j): the move set i needs to weakly dominate set j."""

    labels: list[str]
    values: list[list[float]]
    lower_bounds: list[list[float]]
    stats: list[list[SolveStats]]
    flags: list[list[str]]
    certificates: list[list[DomCertificate | None]] = field(default_factory=list)
    mismatches: list[tuple[str, str, float, float]] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return all(f == OPTIMAL for row in self.flags for f in row)


@dataclass(frozen=True)
class RankEntry:
    label: str
    row_sum: float
    complete: bool
    row_sum_lower: float


def shift_vector(sets: Sequence[PointSet]) -> np.ndarray:
    """Common translation that makes every coordinate of every set non-negative."""
    low = np.vstack([s.points for s in sets]).min(axis=0)
    return np.maximum(0.0, -low)


def solve_pair(p: PointSet, q: PointSet, opts: SolveOptions | None = None,
               shift: np.ndarray | None = None) -> tuple[DomCertificate, SolveStats]:
    """``solve_bb`` on the translated pair; the certificate is re-evaluated on the original data."""
    if shift is None or not np.any(shift > 0):
        return solve_bb(p, q, opts)
    cert, stats = solve_bb(p.translated(shift), q.translated(shift), opts)
    return evaluate_assignment(p, q, cert.assignment), stats


def _solve_pair(args: tuple[PointSet, PointSet, SolveOptions, bool, np.ndarray | None]):
    p, q, opts, cross, shift = args
    cert, stats = solve_pair(p, q, opts, shift)
    bi = None
    if cross and p.dim == 2:
        bi = dom_biobjective(p, q).value
    return cert, stats, bi


def compare_matrix(sets: Sequence[PointSet], cfg: RunConfig | None = None) -> ComparisonMatrix:
    """DoM for every ordered pair of distinct sets; the diagonal is exactly 0."""
    cfg = cfg or RunConfig()
    if len(sets) < 2:
        raise DomError("compare needs at least two sets")
    labels = [s.label for s in sets]
    if len(set(labels)) != len(labels):
        raise DomError(f"set labels must be unique: {labels}")
    dim = sets[0].dim
    for s in sets[1:]:
        if s.dim != dim:
            raise DimensionMismatchError(f"set {s.label!r} has {s.dim} objectives, expected {dim}")
    n = len(sets)
    opts = cfg.solve_options()
    shift = shift_vector(sets) if cfg.shift else None
    if shift is not None and np.any(shift > 0):
        log.info("negative coordinates: translating all sets by %s", shift.tolist())
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    work = [(sets[a], sets[b], opts, cfg.cross_check, shift) for a, b in pairs]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_solve_pair, work))
    else:
        results = [_solve_pair(w) for w in work]

    m = ComparisonMatrix(
        labels=labels,
        values=[[0.0] * n for _ in range(n)],
        lower_bounds=[[0.0] * n for _ in range(n)],
        stats=[[SolveStats(nodes_explored=0) for _ in range(n)] for _ in range(n)],
        flags=[[OPTIMAL] * n for _ in range(n)],
        certificates=[[None] * n for _ in range(n)],
    )
    for (a, b), (cert, stats, bi) in zip(pairs, results):
        m.values[a][b] = cert.value
        m.lower_bounds[a][b] = stats.lower_bound
        m.stats[a][b] = stats
        m.flags[a][b] = OPTIMAL if stats.optimal else INCOMPLETE
        m.certificates[a][b] = cert
        if bi is not None and stats.optimal and abs(bi - cert.value) > 1e-9 * max(1.0, cert.value):
            log.error("biobjective cross-check failed for (%s, %s): %r vs %r", labels[a], labels[b], bi, cert.value)
            m.mismatches.append((labels[a], labels[b], bi, cert.value))
    return m


def rank_summary(m: ComparisonMatrix) -> list[RankEntry]:
    """Labels by ascending row sum (smaller total move ranks first); ties keep input order.

    A row with an incomplete entry is flagged; its ``row_sum_lower`` then sums
    the proven lower bounds instead of the incumbent values.
    """
    entries = []
    for k, label in enumerate(m.labels):
        complete = all(f == OPTIMAL for f in m.flags[k])
        entries.append(RankEntry(label, float(sum(m.values[k])), complete, float(sum(m.lower_bounds[k]))))
    return sorted(entries, key=lambda e: e.row_sum)


def to_json(m: ComparisonMatrix, include_certificates: bool = True) -> str:
    doc = {
        "labels": m.labels,
        "values": m.values,
        "lower_bounds": m.lower_bounds,
        "flags": m.flags,
        "stats": [[s.to_dict(wall_time=False) for s in row] for row in m.stats],
        "ranking": [
            {"label": e.label, "row_sum": e.row_sum, "complete": e.complete, "row_sum_lower": e.row_sum_lower}
            for e in rank_summary(m)
        ],
    }
    if include_certificates:
        doc["certificates"] = [[c.to_dict() if c is not None else None for c in row] for row in m.certificates]
    if m.mismatches:
        doc["cross_check_mismatches"] = [list(x) for x in m.mismatches]
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def to_csv(m: ComparisonMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["P\\Q"] + m.labels)
    for label, row in zip(m.labels, m.values):
        w.writerow([label] + [repr(v) for v in row])
    return buf.getvalue()


def to_text(m: ComparisonMatrix) -> str:
    """Fixed-width table with three decimals, followed by the ranking."""
    width = max(8, max(len(x) for x in m.labels) + 1)
    lines = ["".join(["P \\ Q".ljust(width)] + [x.rjust(width) for x in m.labels])]
    for k, label in enumerate(m.labels):
        cells = []
        for v, f in zip(m.values[k], m.flags[k]):
            cell = f"{v:.3f}" + ("*" if f == INCOMPLETE else "")
            cells.append(cell.rjust(width))
        lines.append(label.ljust(width) + "".join(cells))
    lines.append("")
    lines.append("rank  label  row_sum")
    for r, e in enumerate(rank_summary(m), start=1):
        extra = "" if e.complete else f"  (incomplete; >= {e.row_sum_lower:.3f})"
        lines.append(f"{r:>4}  {e.label}  {e.row_sum:.3f}{extra}")
    if not m.complete:
        lines.append("* search cap hit: value is the best incumbent, not proven optimal")
    return "\n".join(lines) + "\n"


def stats_csv(m: ComparisonMatrix) -> str:
    """One row per ordered pair, for box plots of solve effort."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "q", "value", "lower_bound", "flag", "nodes_explored", "incumbent_updates", "pruned", "wall_time"])
    for a, pa in enumerate(m.labels):
        for b, qb in enumerate(m.labels):
            if a == b:
                continue
            s = m.stats[a][b]
            w.writerow([pa, qb, repr(m.values[a][b]), repr(m.lower_bounds[a][b]), m.flags[a][b],
                        s.nodes_explored, s.incumbent_updates, s.pruned, f"{s.wall_time:.6f}"])
    return buf.getvalue()
