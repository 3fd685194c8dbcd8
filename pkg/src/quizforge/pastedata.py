"""Student-side reverse path: text copied out of a rendered quiz table
back into structured data, and CSV export.

Tokenization prefers tab runs (what browsers put on the clipboard for
table cells) and falls back to whitespace runs. Type inference is strict:
a column is numeric only when every nonempty cell is a plain numeric
literal with a '.' decimal separator; anything else stays text.
"""

from __future__ import annotations

import csv
import io

from .htmlgen import DataTable
from .numfmt import format_number, parse_number


class PasteError(ValueError):
    pass


def _tokenize_line(line: str) -> list[str]:
    if "\t" in line:
        return [t.strip() for t in line.split("\t")]
    return line.split()


def _is_numeric_cell(cell: str) -> bool:
    return parse_number(cell) is not None


def parse_pasted(text: str) -> DataTable:
    """Parse pasted table text into a DataTable.

    Header detection: the first row is a header when all its cells are
    non-numeric while the corresponding column holds numeric cells further
    down. Bare vector tables (no header, homogeneous type, possibly with a
    shorter final row) flow row-major back into a single column, so the
    original vector order is recovered.
    """
    if not text.strip():
        raise PasteError("no input")
    rows = []
    for line in text.splitlines():
        toks = _tokenize_line(line)
        while toks and toks[-1] == "":
            toks.pop()
        if toks:
            rows.append(toks)
    if not rows or not any(any(t for t in r) for r in rows):
        raise PasteError("zero parseable cells")

    widths = {len(r) for r in rows}
    uniform = len(widths) == 1
    # bare vector table: uniform rows except a shorter, padded last one
    vector_shape = (len(rows) == 1 or uniform
                    or (len(widths) == 2 and len(rows[-1]) < max(widths)
                        and all(len(r) == max(widths) for r in rows[:-1])))
    if not uniform and not vector_shape:
        raise PasteError("ragged rows: differing cell counts outside the final row")

    flat = [t for r in rows for t in r]
    all_numeric = all(_is_numeric_cell(t) for t in flat)
    all_text = not any(_is_numeric_cell(t) for t in flat)
    homogeneous = all_numeric or all_text

    header = None
    body = rows
    if uniform and len(rows) > 1:
        first_text = not any(_is_numeric_cell(t) for t in rows[0])
        later_numeric = any(_is_numeric_cell(t) for r in rows[1:] for t in r)
        if first_text and later_numeric:
            header = rows[0]
            body = rows[1:]

    if header is None and homogeneous and vector_shape:
        values = [parse_number(t) if all_numeric else t for t in flat]
        return DataTable([(None, values)])

    if not body:
        raise PasteError("header without data rows")
    ncols = len(body[0])
    if any(len(r) != ncols for r in body):
        raise PasteError("ragged rows: differing cell counts outside the final row")
    columns = []
    for c in range(ncols):
        cells = [r[c] for r in body]
        numeric = all(_is_numeric_cell(t) for t in cells if t != "")
        values = [(parse_number(t) if numeric and t != "" else t) for t in cells]
        columns.append((header[c] if header else None, values))
    return DataTable(columns)


def to_csv(t: DataTable) -> str:
    """RFC 4180 CSV; header row only when the table has column names."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    if t.has_names():
        writer.writerow([n if n is not None else "" for n in t.names])
    for r in range(t.nrows):
        row = []
        for _, values in t.columns:
            v = values[r]
            row.append(format_number(float(v)) if isinstance(v, (int, float))
                       and not isinstance(v, bool) else str(v))
        writer.writerow(row)
    return buf.getvalue()


def from_csv(text: str) -> DataTable:
    """Inverse of to_csv, used by the round-trip checks."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise PasteError("empty CSV")
    projected = "\n".join("\t".join(r) for r in rows)
    return parse_pasted(projected)
