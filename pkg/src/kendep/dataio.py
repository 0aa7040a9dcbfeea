"""CSV ingestion and output, and the bundled biomarker data set."""

from __future__ import annotations

import csv
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ParseError, ShapeError
from .kendall_core import Sample

__all__ = ["ingest_csv", "write_sample_csv", "load_biomarkers", "biomarker_path", "parse_columns"]


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def parse_columns(spec):
    """``"a,b,c"`` -> ``["a", "b", "c"]``; integer-looking entries become 0-based indices."""
    if spec is None:
        return None
    items = [c.strip() for c in spec.split(",")] if isinstance(spec, str) else list(spec)
    return [int(c) if isinstance(c, str) and c.isdigit() else c for c in items if c != ""]


def ingest_csv(path, columns=None, header: str | bool = "auto") -> Sample:
    """Read a comma-separated numeric table.

    Parameters
    ----------
    path : str or Path
    columns : sequence of str or int, optional
        Column labels (or 0-based indices) to keep, in order.
    header : {"auto", True, False}
        ``"auto"`` treats the first row as a header when any of its cells is
        not a number.

    Raises
    ------
    ParseError
        On a missing or non-numeric cell, naming the 1-based line and column.
    ShapeError
        If fewer than 2 rows or 2 columns remain.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8-sig") as fh:
        rows = [(i + 1, row) for i, row in enumerate(csv.reader(fh)) if any(c.strip() for c in row)]
    if not rows:
        raise ShapeError(f"{path} contains no data")
    first_line, first = rows[0]
    has_header = (not all(_is_number(c) for c in first)) if header == "auto" else bool(header)
    if has_header:
        labels = tuple(c.strip() for c in first)
        rows = rows[1:]
    else:
        labels = tuple(f"X{j + 1}" for j in range(len(first)))
    width = len(labels)
    values = np.empty((len(rows), width))
    for r, (line, row) in enumerate(rows):
        if len(row) != width:
            raise ParseError(f"{path}:{line}: expected {width} fields, found {len(row)}", line, None)
        for c, cell in enumerate(row):
            text = cell.strip()
            if text == "":
                raise ParseError(f"{path}:{line}: missing value in column {c + 1} ({labels[c]})", line, c + 1)
            try:
                values[r, c] = float(text)
            except ValueError:
                raise ParseError(
                    f"{path}:{line}: non-numeric value {text!r} in column {c + 1} ({labels[c]})",
                    line, c + 1,
                ) from None
            if not np.isfinite(values[r, c]):
                raise ParseError(f"{path}:{line}: non-finite value in column {c + 1} ({labels[c]})", line, c + 1)
    if values.shape[0] < 2:
        raise ShapeError(f"{path}: need at least 2 data rows, found {values.shape[0]}")
    if values.shape[1] < 2 and columns is None:
        raise ShapeError(f"{path}: need at least 2 columns, found {values.shape[1]}")
    sample = Sample(values, labels) if values.shape[1] >= 2 else None
    if columns is not None:
        cols = parse_columns(columns)
        if len(cols) < 2:
            raise ShapeError("select at least 2 columns")
        if sample is None:
            raise ShapeError(f"{path}: need at least 2 columns, found {values.shape[1]}")
        sample = sample.select(cols)
    return sample


def write_sample_csv(sample: Sample, path) -> None:
    """Write ``sample`` with a header row; floats use the shortest round-trip repr."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(sample.columns)
        for row in sample.values:
            writer.writerow([repr(float(v)) for v in row])


def biomarker_path() -> Path:
    """Location of the bundled biomarker CSV (columns DB, AST, ALT, AP; 208 rows)."""
    return Path(str(resources.files("kendep").joinpath("data/biomarkers.csv")))


def load_biomarkers(columns=None) -> Sample:
    """Biomarkers of hepatic injury: direct bilirubin and three liver enzymes."""
    return ingest_csv(biomarker_path(), columns=columns)
