"""Clustering error under the best one-to-one matching of labels."""

from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DataError

__all__ = ["best_assignment", "confusion_matrix", "error_rate"]

EXHAUSTIVE_MAX_K = 8
MAX_LABELS = 64


def confusion_matrix(pred, truth) -> np.ndarray:
    """``C[a, b]`` = number of points with predicted id ``a`` and true id ``b``.

    Labels are mapped to 0-based ids in sorted order; the matrix is square,
    padded with zeros when the two alphabets differ in size.
    """
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise DataError(f"label vectors differ in shape: {pred.shape} vs {truth.shape}")
    p_ids = np.unique(pred, return_inverse=True)[1]
    t_ids = np.unique(truth, return_inverse=True)[1]
    size = max(p_ids.max(initial=-1), t_ids.max(initial=-1)) + 1
    if size > MAX_LABELS:
        raise DataError(f"at most {MAX_LABELS} distinct labels are supported")
    C = np.zeros((size, size), dtype=np.int64)
    np.add.at(C, (p_ids, t_ids), 1)
    return C


def best_assignment(C: np.ndarray) -> tuple[np.ndarray, int]:
    """Permutation ``perm`` maximizing ``sum_a C[a, perm[a]]`` and that maximum.

    Exhaustive search for up to eight labels, linear assignment above.
    Among equal optima the exhaustive search keeps the lexicographically
    first permutation.
    """
    k = C.shape[0]
    if k <= EXHAUSTIVE_MAX_K:
        rows = np.arange(k)
        best, best_perm = -1, None
        for perm in itertools.permutations(range(k)):
            total = int(C[rows, perm].sum())
            if total > best:
                best, best_perm = total, perm
        return np.array(best_perm, dtype=np.int64), best
    rows, cols = linear_sum_assignment(C, maximize=True)
    perm = np.empty(k, dtype=np.int64)
    perm[rows] = cols
    return perm, int(C[rows, cols].sum())


def error_rate(pred, truth) -> float:
    """Fraction of points misclustered under the best label bijection."""
    C = confusion_matrix(pred, truth)
    n = int(C.sum())
    if n == 0:
        return 0.0
    _, matched = best_assignment(C)
    return (n - matched) / n
