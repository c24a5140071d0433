"""Data-table loading, cleaning, merging and decomposition.

A table is parsed from CSV (header row; first column holds row labels),
its columns are classified as numeric, categorical or rejected, and any
aggregate row whose numeric cells equal the column sums of the others
is dropped. Rejected columns (serial numbers, hex hashes and similar
identifier junk) stay in the table but are never plotted.
"""
from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import TableError

MISSING_MARKERS = {"", "n/a", "na", "null"}

# Identifier-like cell patterns: hex literals, long hex hashes, and
# mixed letter/digit serial codes. A column mostly made of these is
# rejected from plotting.
_SERIAL_PATTERNS = [
    re.compile(r"^0x[0-9a-fA-F]+$"),
    re.compile(r"^(?=.*[0-9])(?=.*[a-fA-F])[0-9a-fA-F]{8,}$"),
    re.compile(r"^(?=.*[0-9])(?=.*[A-Za-z])[A-Za-z0-9\-_/]{6,}$"),
]

# Fraction of non-missing cells that must look identifier-like for a
# column to be rejected, and that must parse as numbers for a column
# to be numeric.
SERIAL_REJECT_FRACTION = 0.5
NUMERIC_PARSE_FRACTION = 0.6


@dataclass(frozen=True)
class Column:
    header: str
    kind: str  # numeric | categorical | rejected
    values: tuple  # floats or None for numeric; strings or None otherwise


@dataclass(frozen=True)
class DataTable:
    name: str
    row_labels: tuple
    columns: tuple = field(default_factory=tuple)
    label_header: str = ""  # header text above the row-label column

    @property
    def numeric_columns(self) -> list:
        return [c for c in self.columns if c.kind == "numeric"]

    def column(self, header: str) -> Column:
        for c in self.columns:
            if c.header == header:
                return c
        raise KeyError(header)


def is_missing(cell: str) -> bool:
    return cell.strip().lower() in MISSING_MARKERS


def parse_number(cell: str):
    """Parse a numeric cell, tolerating thousands separators."""
    text = cell.strip().replace(",", "")
    try:
        value = float(text)
    except ValueError:
        return None
    if not math.isfinite(value):
        return None
    return value


def _looks_serial(cell: str) -> bool:
    text = cell.strip()
    return any(p.match(text) for p in _SERIAL_PATTERNS)


def classify_cells(cells: list) -> str:
    """Classify a raw column as numeric, categorical or rejected."""
    present = [c for c in cells if not is_missing(c)]
    if not present:
        return "categorical"
    serial = sum(1 for c in present if _looks_serial(c))
    if serial > SERIAL_REJECT_FRACTION * len(present):
        return "rejected"
    numeric = sum(1 for c in present if parse_number(c) is not None)
    if numeric >= NUMERIC_PARSE_FRACTION * len(present):
        return "numeric"
    return "categorical"


def _build_column(header: str, cells: list) -> Column:
    kind = classify_cells(cells)
    if kind == "numeric":
        values = tuple(None if is_missing(c) else parse_number(c)
                       for c in cells)
    else:
        values = tuple(None if is_missing(c) else c.strip() for c in cells)
    return Column(header=header, kind=kind, values=values)


def _aggregate_candidates(row_labels, columns) -> list:
    """Indices of rows whose numeric cells all equal the sums of the
    other rows' cells, column by column."""
    numeric = [c for c in columns if c.kind == "numeric"]
    if not numeric:
        return []
    n = len(row_labels)
    if n < 2:
        return []
    out = []
    for i in range(n):
        ok = True
        for col in numeric:
            cell = col.values[i]
            if cell is None:
                ok = False
                break
            others = [v for j, v in enumerate(col.values)
                      if j != i and v is not None]
            total = float(sum(others))
            if not math.isclose(cell, total, rel_tol=1e-9, abs_tol=1e-12):
                ok = False
                break
        if ok:
            out.append(i)
    return out


def load_table(csv_bytes: bytes, name: str = "table") -> DataTable:
    """Parse CSV bytes into a classified, cleaned table.

    The header row names the columns; the first column supplies row
    labels. Aggregate rows (numeric cells equal to the column sums of
    every other row) are removed, unless every row qualifies.
    """
    try:
        text = csv_bytes.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise TableError(f"{name}: not valid UTF-8: {exc}") from None
    reader = csv.reader(io.StringIO(text))
    try:
        rows = list(reader)
    except csv.Error as exc:
        raise TableError(f"{name}: line {reader.line_num}: {exc}") from None
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows:
        raise TableError(f"{name}: no header row")
    header = [c.strip() for c in rows[0]]
    width = len(header)
    if width < 2:
        raise TableError(f"{name}: need a label column and one data column")
    if len(set(header[1:])) != width - 1:
        raise TableError(f"{name}: duplicate column headers")
    data = rows[1:]
    if not data:
        raise TableError(f"{name}: no data rows")
    for k, row in enumerate(data):
        if len(row) != width:
            raise TableError(
                f"{name}: line {k + 2}: expected {width} cells, got {len(row)}")
    row_labels = [r[0].strip() for r in data]
    if len(set(row_labels)) != len(row_labels):
        raise TableError(f"{name}: duplicate row labels")
    columns = [_build_column(header[j], [r[j] for r in data])
               for j in range(1, width)]

    drop = _aggregate_candidates(row_labels, columns)
    if drop and len(drop) < len(row_labels):
        keep = [i for i in range(len(row_labels)) if i not in set(drop)]
        row_labels = [row_labels[i] for i in keep]
        columns = [replace(c, values=tuple(c.values[i] for i in keep))
                   for c in columns]
    return DataTable(name=name, row_labels=tuple(row_labels),
                     columns=tuple(columns), label_header=header[0])


def impute_missing(column: Column, rng: np.random.Generator) -> Column:
    """Fill missing numeric cells with draws from a normal distribution
    fitted to the observed values (sample mean and standard deviation).

    A column with fewer than two observed values cannot be fitted and
    is reclassified as rejected. A column with nothing missing is
    returned unchanged and consumes no random values.
    """
    if column.kind != "numeric":
        return column
    observed = [v for v in column.values if v is not None]
    if len(observed) == len(column.values):
        return column
    if len(observed) < 2:
        return replace(column, kind="rejected")
    mu = float(np.mean(observed))
    sigma = float(np.std(observed, ddof=1))
    values = tuple(v if v is not None else float(rng.normal(mu, sigma))
                   for v in column.values)
    return replace(column, values=values)


def impute_table(table: DataTable, rng: np.random.Generator) -> DataTable:
    columns = tuple(impute_missing(c, rng) for c in table.columns)
    return replace(table, columns=columns)


def merge_tables(tables: list) -> DataTable:
    """Join tables column-wise, aligning rows by label.

    All inputs must cover the same row-label set (any order). Column
    headers used by more than one input are disambiguated by suffixing
    the source table name.
    """
    if not tables:
        raise TableError("merge: no input tables")
    base = tables[0]
    base_set = set(base.row_labels)
    for t in tables[1:]:
        if set(t.row_labels) != base_set:
            missing = sorted(base_set ^ set(t.row_labels))
            raise TableError(
                f"merge: row labels differ between {base.name!r} and "
                f"{t.name!r}: {missing}")
    counts = {}
    for t in tables:
        for c in t.columns:
            counts[c.header] = counts.get(c.header, 0) + 1
    columns = []
    for t in tables:
        index = {label: i for i, label in enumerate(t.row_labels)}
        order = [index[label] for label in base.row_labels]
        for c in t.columns:
            header = c.header
            if counts[header] > 1:
                header = f"{header} ({t.name})"
            columns.append(Column(header=header, kind=c.kind,
                                  values=tuple(c.values[i] for i in order)))
    headers = [c.header for c in columns]
    if len(set(headers)) != len(headers):
        raise TableError(f"merge: headers still collide after suffixing: "
                         f"{sorted(h for h in headers if headers.count(h) > 1)}")
    name = "+".join(t.name for t in tables)
    return DataTable(name=name, row_labels=base.row_labels,
                     columns=tuple(columns), label_header=base.label_header)


def decompose_table(table: DataTable, axis: str,
                    group_size: int = 0) -> list:
    """Split a table along columns or into consecutive row groups.

    Outputs that end up with no numeric column are discarded; the
    result may therefore be empty.
    """
    out = []
    if axis == "by_column":
        for c in table.columns:
            out.append(DataTable(name=f"{table.name}/{c.header}",
                                 row_labels=table.row_labels,
                                 columns=(c,),
                                 label_header=table.label_header))
    elif axis == "by_row_group":
        if group_size < 1:
            raise TableError("decompose: group_size must be >= 1")
        n = len(table.row_labels)
        for start in range(0, n, group_size):
            stop = min(start + group_size, n)
            cols = tuple(replace(c, values=c.values[start:stop])
                         for c in table.columns)
            out.append(DataTable(
                name=f"{table.name}/rows{start}-{stop - 1}",
                row_labels=table.row_labels[start:stop],
                columns=cols,
                label_header=table.label_header))
    else:
        raise TableError(f"decompose: unknown axis {axis!r}")
    return [t for t in out if t.numeric_columns]
