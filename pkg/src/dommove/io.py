"""CSV reading and writing of point sets.

One point per row, one column per objective, UTF-8. An optional first row of
column names (``f1,...,fM``) is recognised by its non-numeric cells.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import IO, TextIO

from dommove.errors import CsvFormatError
from dommove.geometry import PointSet
from dommove.mip import format_number


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def parse_pointset(source: str | Path | TextIO, label: str | None = None) -> PointSet:
    """Read a point set from a path or an open text stream.

    The label defaults to the file stem. Errors carry the 1-based row number.
    """
    if isinstance(source, (str, Path)):
        path = Path(source)
        with path.open(encoding="utf-8", newline="") as fh:
            return _parse(fh, path.stem if label is None else label)
    return _parse(source, label or "")


def _parse(fh: IO[str], label: str) -> PointSet:
    rows: list[list[float]] = []
    dim = None
    for rowno, row in enumerate(csv.reader(fh), start=1):
        cells = [c.strip() for c in row]
        if not cells or all(c == "" for c in cells):
            continue
        if rowno == 1 and not all(_is_number(c) for c in cells):
            dim = len(cells)
            continue
        if dim is None:
            dim = len(cells)
        elif len(cells) != dim:
            raise CsvFormatError(f"expected {dim} values, found {len(cells)}", rowno)
        try:
            values = [float(c) for c in cells]
        except ValueError:
            bad = next(c for c in cells if not _is_number(c))
            raise CsvFormatError(f"non-numeric cell {bad!r}", rowno) from None
        if any(v != v or v in (float("inf"), float("-inf")) for v in values):
            raise CsvFormatError("non-finite value", rowno)
        rows.append(values)
    if not rows:
        raise CsvFormatError(f"empty set {label!r}")
    return PointSet.from_rows(rows, label)


def format_pointset(s: PointSet, header: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow([f"f{m + 1}" for m in range(s.dim)])
    for row in s.points:
        writer.writerow([format_number(float(x)) for x in row])
    return buf.getvalue()


def write_pointset(s: PointSet, path: str | Path, header: bool = True) -> None:
    Path(path).write_text(format_pointset(s, header), encoding="utf-8")
