"""Mixed-integer model of the dominance move and its LP-format text form.

Variables (0-based indices, P-point ``i``, Q-point ``j``, objective ``m``):

``zp_i_m``       move of p_i in objective m (continuous, >= 0)
``zpq_i_j_m``    remaining gap max(0, pl_i_m - q_j_m) (continuous, >= 0)
``pl_i_m``       moved coordinate, bounded by [lbp_i_m, p_i_m]
``xp_i``         p_i is used (binary)
``xpq_i_j``      q_j is covered by p_i (binary)
``xpqd_i_j_m``   selects the branch of the max() linearization (binary)

The objective is the sum of all ``zp`` and ``zpq`` variables.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from dommove.errors import DimensionMismatchError, EmptySetError, LPParseError, NegativeCoordinateError
from dommove.geometry import PointSet, reduce_instance

CONTINUOUS = "continuous"
BINARY = "binary"
SENSES = ("<=", ">=", "=")

# constraint-coefficient forms for the upper bound of zpq; see build_model
BIG_M_FORMS = ("corrected", "verbatim")


@dataclass(frozen=True)
class MipVariable:
    name: str
    kind: str = CONTINUOUS
    lower: float = 0.0
    upper: float = math.inf


@dataclass(frozen=True)
class MipConstraint:
    name: str
    terms: tuple[tuple[str, float], ...]
    sense: str
    rhs: float


@dataclass(frozen=True)
class ModelMeta:
    """Instance data behind a model. Not part of the LP text."""

    np_: int
    nq: int
    dim: int
    p: np.ndarray
    q: np.ndarray
    lbp: np.ndarray
    ubp: np.ndarray
    big_m: np.ndarray
    p_kept: tuple[int, ...]
    q_kept: tuple[int, ...]
    big_m_form: str = "corrected"


@dataclass(frozen=True)
class MipModel:
    """A minimization MIP. Equality compares the structure only."""

    variables: tuple[MipVariable, ...]
    constraints: tuple[MipConstraint, ...]
    objective: tuple[tuple[str, float], ...]
    meta: ModelMeta | None = field(default=None, compare=False)
    # leading comment lines of the LP text
    header: tuple[str, ...] = field(default=(), compare=False)

    def variable_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for v in self.variables:
            prefix = v.name.split("_", 1)[0]
            counts[prefix] = counts.get(prefix, 0) + 1
        return counts

    def constraint_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for c in self.constraints:
            prefix = re.sub(r"(_\d+)+$", "", c.name)
            counts[prefix] = counts.get(prefix, 0) + 1
        return counts

    def validate(self) -> None:
        """Raise ValueError if the model violates its own invariants."""
        names = [v.name for v in self.variables]
        known = set(names)
        if len(known) != len(names):
            raise ValueError("duplicate variable names")
        for v in self.variables:
            if v.kind == BINARY and (v.lower, v.upper) != (0.0, 1.0):
                raise ValueError(f"binary {v.name} must have bounds [0, 1]")
            if v.lower > v.upper:
                raise ValueError(f"empty bounds on {v.name}")
        for c in self.constraints:
            if c.sense not in SENSES:
                raise ValueError(f"bad sense in {c.name}")
            for name, coef in c.terms:
                if name not in known:
                    raise ValueError(f"{c.name} references undeclared {name}")
                if not math.isfinite(coef):
                    raise ValueError(f"non-finite coefficient in {c.name}")
        for name, _ in self.objective:
            if name not in known:
                raise ValueError(f"objective references undeclared {name}")


def closed_form_counts(np_: int, nq: int, dim: int) -> dict[str, int]:
    """Number of variables per family and of constraints for a given shape."""
    return {
        "zp": np_ * dim,
        "zpq": np_ * nq * dim,
        "pl": np_ * dim,
        "xp": np_,
        "xpq": np_ * nq,
        "xpqd": np_ * nq * dim,
        "constraints": 2 * np_ * dim + 3 * np_ * nq * dim + np_ * nq + np_ + nq,
    }


def big_m_table(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """``M[i, j, m] = max(0, p[i, m] - q[j, m])``."""
    return np.maximum(0.0, P[:, None, :] - Q[None, :, :])


def _terms(*pairs: tuple[str, float]) -> tuple[tuple[str, float], ...]:
    return tuple((n, float(c)) for n, c in pairs if c != 0.0)


def build_model(p: PointSet, q: PointSet, preprocess: bool = True, big_m_form: str = "corrected") -> MipModel:
    """Build the dominance move MIP for ``(p, q)``.

    Coordinates must be non-negative; translate both sets first otherwise.

    ``big_m_form`` picks the coefficient K of ``(1 - xpqd)`` in the upper
    bound ``zpq <= pl - q + K (1 - xpqd)``. ``"verbatim"`` uses
    ``K = M - lbp - q``, which makes the model infeasible as soon as some
    ``q[j, m] > p[i, m]``. ``"corrected"`` (default) uses
    ``K = M - (lbp - q)``, which is at least the ``q - lbp`` that the
    max(0, .) linearization needs.
    """
    if p.dim != q.dim:
        raise DimensionMismatchError(f"dimension mismatch: {p.dim} vs {q.dim}")
    if big_m_form not in BIG_M_FORMS:
        raise ValueError(f"big_m_form must be one of {BIG_M_FORMS}")
    if (len(p) and p.points.min() < 0) or (len(q) and q.points.min() < 0):
        raise NegativeCoordinateError("shift required: the model needs non-negative coordinates")
    if preprocess:
        red = reduce_instance(p, q)
        p_kept, q_kept = red.p_kept, red.q_kept
    else:
        if len(p) == 0:
            raise EmptySetError("empty dominating set")
        p_kept, q_kept = tuple(range(len(p))), tuple(range(len(q)))
    P, Q = p.points[list(p_kept)], q.points[list(q_kept)]
    NP, NQ, D = len(P), len(Q), p.dim
    if NQ == 0:
        raise EmptySetError("nothing to dominate: every q is already weakly dominated")

    ubp = P.copy()
    lbp = np.minimum(P, Q.min(axis=0)[None, :])
    bigm = big_m_table(P, Q)

    zp = lambda i, m: f"zp_{i}_{m}"
    zpq = lambda i, j, m: f"zpq_{i}_{j}_{m}"
    pl = lambda i, m: f"pl_{i}_{m}"
    xp = lambda i: f"xp_{i}"
    xpq = lambda i, j: f"xpq_{i}_{j}"
    xpqd = lambda i, j, m: f"xpqd_{i}_{j}_{m}"

    variables: list[MipVariable] = []
    variables += [MipVariable(zp(i, m)) for i in range(NP) for m in range(D)]
    variables += [MipVariable(zpq(i, j, m)) for i in range(NP) for j in range(NQ) for m in range(D)]
    variables += [MipVariable(pl(i, m), CONTINUOUS, float(lbp[i, m]), float(ubp[i, m]))
                  for i in range(NP) for m in range(D)]
    variables += [MipVariable(xp(i), BINARY, 0.0, 1.0) for i in range(NP)]
    variables += [MipVariable(xpq(i, j), BINARY, 0.0, 1.0) for i in range(NP) for j in range(NQ)]
    variables += [MipVariable(xpqd(i, j, m), BINARY, 0.0, 1.0)
                  for i in range(NP) for j in range(NQ) for m in range(D)]

    cons: list[MipConstraint] = []
    for i in range(NP):
        for m in range(D):
            pim = float(P[i, m])
            # zp >= p xp - pl ;  zp <= p xp
            cons.append(MipConstraint(f"zp_lo_{i}_{m}", _terms((zp(i, m), 1), (xp(i), -pim), (pl(i, m), 1)), ">=", 0.0))
            cons.append(MipConstraint(f"zp_hi_{i}_{m}", _terms((zp(i, m), 1), (xp(i), -pim)), "<=", 0.0))
    for i in range(NP):
        for j in range(NQ):
            for m in range(D):
                pim, qjm, mij = float(P[i, m]), float(Q[j, m]), float(bigm[i, j, m])
                if big_m_form == "corrected":
                    k = mij - (float(lbp[i, m]) - qjm)
                else:
                    k = mij - float(lbp[i, m]) - qjm
                # zpq >= pl - q - p (1 - xpq)
                cons.append(MipConstraint(
                    f"zpq_lo_{i}_{j}_{m}",
                    _terms((zpq(i, j, m), 1), (pl(i, m), -1), (xpq(i, j), -pim)),
                    ">=", -qjm - pim))
                # zpq <= pl - q + K (1 - xpqd)
                cons.append(MipConstraint(
                    f"zpq_max_{i}_{j}_{m}",
                    _terms((zpq(i, j, m), 1), (pl(i, m), -1), (xpqd(i, j, m), k)),
                    "<=", k - qjm))
                # zpq <= M xpqd
                cons.append(MipConstraint(
                    f"zpq_hi_{i}_{j}_{m}",
                    _terms((zpq(i, j, m), 1), (xpqd(i, j, m), -mij)),
                    "<=", 0.0))
    for i in range(NP):
        for j in range(NQ):
            cons.append(MipConstraint(f"link_{i}_{j}", _terms((xp(i), 1), (xpq(i, j), -1)), ">=", 0.0))
    for i in range(NP):
        cons.append(MipConstraint(f"use_{i}", _terms((xp(i), 1), *[(xpq(i, j), -1) for j in range(NQ)]), "<=", 0.0))
    for j in range(NQ):
        cons.append(MipConstraint(f"assign_{j}", _terms(*[(xpq(i, j), 1) for i in range(NP)]), "=", 1.0))

    objective = tuple((zp(i, m), 1.0) for i in range(NP) for m in range(D)) + tuple(
        (zpq(i, j, m), 1.0) for i in range(NP) for j in range(NQ) for m in range(D))
    meta = ModelMeta(NP, NQ, D, P, Q, lbp, ubp, bigm, tuple(p_kept), tuple(q_kept), big_m_form)
    header = ("dominance move model", f"shape NP={NP} NQ={NQ} M={D} big_m={big_m_form}")
    return MipModel(tuple(variables), tuple(cons), objective, meta, header)


# -- LP text -----------------------------------------------------------------

_TERMS_PER_LINE = 8


def format_number(x: float) -> str:
    """Shortest round-trip decimal; integral values without a trailing ``.0``."""
    if math.isinf(x):
        return "+inf" if x > 0 else "-inf"
    s = repr(float(x))
    if s.endswith(".0"):
        s = s[:-2]
    return "0" if s == "-0" else s


def _format_terms(terms: Sequence[tuple[str, float]]) -> list[str]:
    parts = []
    for k, (name, coef) in enumerate(terms):
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = name if mag == 1.0 else f"{format_number(mag)} {name}"
        if k == 0:
            parts.append(f"- {body}" if sign == "-" else body)
        else:
            parts.append(f"{sign} {body}")
    return parts


def _wrap(head: str, parts: list[str], tail: str = "") -> list[str]:
    lines = []
    for start in range(0, len(parts), _TERMS_PER_LINE):
        chunk = " ".join(parts[start : start + _TERMS_PER_LINE])
        lines.append((head if start == 0 else "   ") + chunk)
    lines[-1] += tail
    return lines


def export_lp(model: MipModel) -> str:
    """Deterministic CPLEX-style LP text for ``model``.

    Every variable appears in the Bounds section in declaration order, so the
    text can be parsed back into an identical model.
    """
    out = [f"\\ {line}" for line in model.header]
    if not model.objective:
        raise ValueError("empty objective")
    out.append("Minimize")
    out += _wrap(" obj: ", _format_terms(model.objective))
    out.append("Subject To")
    for c in model.constraints:
        if not c.terms:
            raise ValueError(f"constraint {c.name} has no terms")
        out += _wrap(f" {c.name}: ", _format_terms(c.terms), f" {c.sense} {format_number(c.rhs)}")
    out.append("Bounds")
    for v in model.variables:
        if v.upper == math.inf:
            out.append(f" {v.name} >= {format_number(v.lower)}")
        else:
            out.append(f" {format_number(v.lower)} <= {v.name} <= {format_number(v.upper)}")
    binaries = [v.name for v in model.variables if v.kind == BINARY]
    if binaries:
        out.append("Binary")
        for start in range(0, len(binaries), _TERMS_PER_LINE):
            out.append(" " + " ".join(binaries[start : start + _TERMS_PER_LINE]))
    out.append("End")
    return "\n".join(out) + "\n"


_SECTIONS = {"minimize": "obj", "subject to": "st", "bounds": "bounds", "binary": "bin", "end": "end"}
_NAME = r"[A-Za-z_][A-Za-z0-9_.]*"
_NUM = r"[+-]?(?:inf|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
_TERM_RE = re.compile(rf"\s*([+-])?\s*({_NUM}(?=\s))?\s*({_NAME})")


def _parse_number(tok: str, line: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise LPParseError(f"expected a number, got {tok!r}", line) from None


def _parse_expr(text: str, line: int) -> tuple[tuple[str, float], ...]:
    terms = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if not m or m.end() == pos:
            raise LPParseError(f"cannot parse term near {text[pos:pos + 20]!r}", line)
        sign, num, name = m.groups()
        if terms and sign is None:
            raise LPParseError("missing operator between terms", line)
        coef = _parse_number(num, line) if num else 1.0
        if sign == "-":
            coef = -coef
        terms.append((name, coef))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return tuple(terms)


def parse_lp(text: str) -> MipModel:
    """Parse LP text written by :func:`export_lp` back into a model."""
    if not text.strip():
        raise LPParseError("empty LP text", 1)
    section = None
    seen_end = False
    obj_lines: list[tuple[int, str]] = []
    cons_stmts: list[tuple[int, str]] = []
    bounds: list[tuple[int, str]] = []
    binaries: list[str] = []
    header: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if s.startswith("\\"):
            if section is None:
                header.append(s[1:].strip())
            continue
        if not s:
            continue
        key = s.lower()
        if key in _SECTIONS:
            if seen_end:
                raise LPParseError("content after End", lineno)
            section = _SECTIONS[key]
            seen_end = section == "end"
            continue
        if section is None:
            raise LPParseError("text before the Minimize section", lineno)
        if section == "end":
            raise LPParseError("content after End", lineno)
        if section == "obj":
            obj_lines.append((lineno, s))
        elif section == "st":
            if ":" in s:
                cons_stmts.append((lineno, s))
            elif cons_stmts and raw.startswith(" "):
                ln, prev = cons_stmts[-1]
                cons_stmts[-1] = (ln, prev + " " + s)
            else:
                raise LPParseError("constraint without a name", lineno)
        elif section == "bounds":
            bounds.append((lineno, s))
        elif section == "bin":
            binaries.extend(s.split())
    if not seen_end:
        raise LPParseError("missing End", len(text.splitlines()))
    if not obj_lines:
        raise LPParseError("missing objective", 1)

    ln0 = obj_lines[0][0]
    obj_text = " ".join(s for _, s in obj_lines)
    if ":" in obj_text:
        obj_text = obj_text.split(":", 1)[1]
    objective = _parse_expr(obj_text, ln0)

    constraints = []
    sense_re = re.compile(r"^(.*?)(<=|>=|=)\s*(\S+)$")
    for ln, stmt in cons_stmts:
        name, body = stmt.split(":", 1)
        m = sense_re.match(body.strip())
        if not m:
            raise LPParseError("constraint needs a sense and right-hand side", ln)
        expr, sense, rhs = m.groups()
        constraints.append(MipConstraint(name.strip(), _parse_expr(expr, ln), sense, _parse_number(rhs, ln)))

    declared: dict[str, tuple[float, float]] = {}
    order: list[str] = []
    two_sided = re.compile(rf"^({_NUM})\s*<=\s*({_NAME})\s*<=\s*({_NUM})$")
    lower_only = re.compile(rf"^({_NAME})\s*>=\s*({_NUM})$")
    for ln, s in bounds:
        m = two_sided.match(s)
        if m:
            name, lo, hi = m.group(2), _parse_number(m.group(1), ln), _parse_number(m.group(3), ln)
        else:
            m = lower_only.match(s)
            if not m:
                raise LPParseError(f"unsupported bound {s!r}", ln)
            name, lo, hi = m.group(1), _parse_number(m.group(2), ln), math.inf
        if name in declared:
            raise LPParseError(f"duplicate bound for {name}", ln)
        declared[name] = (lo, hi)
        order.append(name)
    bin_set = set(binaries)
    missing = bin_set - set(declared)
    if missing:
        raise LPParseError(f"binary variable without bounds: {sorted(missing)[0]}", 0)
    variables = tuple(
        MipVariable(n, BINARY if n in bin_set else CONTINUOUS, *declared[n]) for n in order
    )
    model = MipModel(variables, tuple(constraints), objective, header=tuple(header))
    try:
        model.validate()
    except ValueError as exc:
        raise LPParseError(str(exc), 0) from None
    return model


# -- solving and checking ----------------------------------------------------

@dataclass(frozen=True)
class MilpResult:
    status: str  # "optimal", "infeasible" or another solver status
    objective: float | None
    values: dict[str, float]


def solve_model(model: MipModel, time_limit: float | None = None) -> MilpResult:
    """Solve ``model`` exactly (zero relative gap) with HiGHS through SciPy."""
    from scipy.optimize import Bounds, LinearConstraint, milp
    from scipy.sparse import coo_matrix

    index = {v.name: k for k, v in enumerate(model.variables)}
    n = len(model.variables)
    c = np.zeros(n)
    for name, coef in model.objective:
        c[index[name]] += coef
    rows, cols, vals, lo, hi = [], [], [], [], []
    for r, con in enumerate(model.constraints):
        for name, coef in con.terms:
            rows.append(r)
            cols.append(index[name])
            vals.append(coef)
        lo.append(con.rhs if con.sense in (">=", "=") else -np.inf)
        hi.append(con.rhs if con.sense in ("<=", "=") else np.inf)
    A = coo_matrix((vals, (rows, cols)), shape=(len(model.constraints), n)).tocsr()
    integrality = np.array([1 if v.kind == BINARY else 0 for v in model.variables])
    bounds = Bounds([v.lower for v in model.variables], [v.upper for v in model.variables])
    options = {"mip_rel_gap": 0.0}
    if time_limit is not None:
        options["time_limit"] = time_limit
    res = milp(c, constraints=LinearConstraint(A, lo, hi), integrality=integrality, bounds=bounds, options=options)
    status = {0: "optimal", 1: "limit", 2: "infeasible", 3: "unbounded"}.get(res.status, "error")
    if res.x is None:
        return MilpResult(status, None, {})
    return MilpResult(status, float(res.fun), {v.name: float(x) for v, x in zip(model.variables, res.x)})


def assignment_from_solution(model: MipModel, values: dict[str, float]) -> list[int]:
    """Read the q -> p assignment (model indices) off a solution's xpq values."""
    m = model.meta
    if m is None:
        raise ValueError("model carries no instance data")
    out = []
    for j in range(m.nq):
        col = [values[f"xpq_{i}_{j}"] for i in range(m.np_)]
        out.append(int(np.argmax(col)))
    return out


def feasible_point(model: MipModel, assignment: Sequence[int]) -> dict[str, float]:
    """Complete an assignment (model indices) to values of every model variable.

    Each used p is moved to the componentwise minimum of its group; unused
    points stay put.
    """
    m = model.meta
    if m is None:
        raise ValueError("model carries no instance data")
    a = np.asarray(assignment, dtype=int)
    if a.shape != (m.nq,):
        raise ValueError("assignment must have one entry per modeled q")
    vals: dict[str, float] = {}
    for i in range(m.np_):
        members = a == i
        used = bool(members.any())
        moved = np.minimum(m.p[i], m.q[members].min(axis=0)) if used else m.p[i].copy()
        vals[f"xp_{i}"] = 1.0 if used else 0.0
        for mm in range(m.dim):
            vals[f"pl_{i}_{mm}"] = float(moved[mm])
            vals[f"zp_{i}_{mm}"] = float(m.p[i, mm] - moved[mm]) if used else 0.0
        for j in range(m.nq):
            vals[f"xpq_{i}_{j}"] = 1.0 if a[j] == i else 0.0
            for mm in range(m.dim):
                gap = float(moved[mm] - m.q[j, mm])
                vals[f"zpq_{i}_{j}_{mm}"] = max(0.0, gap) if a[j] == i else 0.0
                vals[f"xpqd_{i}_{j}_{mm}"] = 1.0 if gap >= 0.0 else 0.0
    return vals


def violations(model: MipModel, values: dict[str, float], tol: float = 1e-9) -> list[str]:
    """Names of the constraints and bounds that ``values`` violates."""
    bad = []
    for v in model.variables:
        x = values[v.name]
        if x < v.lower - tol or x > v.upper + tol:
            bad.append(f"bound:{v.name}")
        if v.kind == BINARY and abs(x - round(x)) > tol:
            bad.append(f"integrality:{v.name}")
    for c in model.constraints:
        lhs = sum(coef * values[name] for name, coef in c.terms)
        scale = tol * max(1.0, abs(c.rhs))
        if (c.sense == "<=" and lhs > c.rhs + scale) or (c.sense == ">=" and lhs < c.rhs - scale) or (
            c.sense == "=" and abs(lhs - c.rhs) > scale
        ):
            bad.append(c.name)
    return bad


def objective_value(model: MipModel, values: dict[str, float]) -> float:
    return float(sum(coef * values[name] for name, coef in model.objective))
