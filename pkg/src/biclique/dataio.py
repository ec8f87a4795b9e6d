"""CSV loading for feature matrices with optional class labels."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError

__all__ = ["load_csv", "load_labels"]


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_labels(path) -> np.ndarray:
    """One label per non-empty line."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"labels file not found: {path}")
    return np.array([line.strip() for line in path.read_text().splitlines() if line.strip()])


def load_csv(path, label_column: int | str | None = None, labels_path=None):
    """Read a numeric feature matrix and optional labels from a CSV file.

    Parameters
    ----------
    path : path-like
        Comma-separated file.  The first row is a header when none of its
        cells is numeric.
    label_column : int, str or None
        Column holding class labels, by position (negative counts from the
        end) or by header name.  That column is excluded from the features.
    labels_path : path-like, optional
        Sidecar file with one label per line, used when ``label_column`` is
        None.

    Returns
    -------
    X : ndarray of shape (n, d)
    labels : ndarray of int or None
        Labels mapped to ``0..k-1`` in sorted order of the original values.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"input file not found: {path}")
    with path.open(newline="") as fh:
        rows = [(i, row) for i, row in enumerate(csv.reader(fh), start=1)
                if row and any(cell.strip() for cell in row)]
    if not rows:
        raise DataError(f"{path}: no data rows")
    header = None
    if not any(_is_number(cell.strip()) for cell in rows[0][1]):
        header = [cell.strip() for cell in rows[0][1]]
        rows = rows[1:]
        if not rows:
            raise DataError(f"{path}: header but no data rows")
    width = len(rows[0][1])
    label_idx = None
    if isinstance(label_column, str) and not label_column.lstrip("-").isdigit():
        if header is None or label_column not in header:
            raise ConfigError(f"label column {label_column!r} not found in {path}")
        label_idx = header.index(label_column)
    elif label_column is not None:
        label_idx = int(label_column)
        if not -width <= label_idx < width:
            raise ConfigError(f"label column {label_idx} outside 0..{width - 1}")
        label_idx %= width

    features, raw_labels = [], []
    for lineno, row in rows:
        if len(row) != width:
            raise DataError(f"{path}:{lineno}: expected {width} columns, found {len(row)}")
        values = []
        for col, cell in enumerate(row):
            if col == label_idx:
                raw_labels.append(cell.strip())
                continue
            try:
                values.append(float(cell))
            except ValueError:
                raise DataError(f"{path}:{lineno}: column {col + 1} is not numeric: {cell!r}") from None
        features.append(values)
    X = np.array(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] == 0:
        raise DataError(f"{path}: no feature columns")
    if not np.all(np.isfinite(X)):
        raise DataError(f"{path}: non-finite feature values")

    if label_idx is None and labels_path is not None:
        raw_labels = list(load_labels(labels_path))
        if len(raw_labels) != X.shape[0]:
            raise DataError(f"{labels_path}: {len(raw_labels)} labels for {X.shape[0]} rows")
    if not raw_labels:
        return X, None
    return X, np.unique(np.array(raw_labels), return_inverse=True)[1].astype(np.int64)
