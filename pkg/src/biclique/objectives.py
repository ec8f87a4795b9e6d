"""Weighted kernel k-means objectives, evaluated several independent ways.

For a partition with point weights ``w`` and cluster weights ``s_j``, the
weighted kernel k-means objective is

    sum_j [ sum_{i in j} w_i K_ii - sum_{r,l in j} w_r w_l K_rl / s_j ]

which equals ``tr(W^1/2 K W^1/2) - tr(Y^T W^1/2 K W^1/2 Y)`` with
``Y_ij = sqrt(w_i / s_j)`` on cluster members.  The multi-way variants
replace ``K`` by the contracted biclique gram.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DataError, DegeneratePartitionError, SizeGuardError
from .kernels import as_data_matrix, biclique_gram_fast
from .tensor_core import require_even

__all__ = [
    "WeightedPartition",
    "indicator_matrix",
    "multiway_wkk_direct",
    "multiway_wkk_trace",
    "psi_prime_features",
    "psi_prime_objective",
    "wkk_feature",
    "wkk_gram",
    "wkk_trace_terms",
]

DIRECT_MAX_TUPLES = 12**4


@dataclass(frozen=True, eq=False)
class WeightedPartition:
    """Cluster ids ``0..k-1`` with a positive weight per point."""

    labels: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        labels = np.array(self.labels, dtype=np.int64)
        weights = np.array(self.weights, dtype=np.float64)
        if labels.ndim != 1 or labels.shape != weights.shape:
            raise DataError("labels and weights must be vectors of equal length")
        if np.any(~(weights > 0)):
            raise DataError("weights must be positive")
        k = int(labels.max()) + 1 if labels.size else 0
        if labels.size == 0 or labels.min() < 0 or np.unique(labels).size != k:
            raise DegeneratePartitionError("every cluster id in 0..k-1 must be used")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, labels) -> "WeightedPartition":
        labels = np.asarray(labels)
        return cls(labels, np.ones(labels.shape[0]))

    @property
    def k(self) -> int:
        return int(self.labels.max()) + 1

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    def cluster_weights(self) -> np.ndarray:
        return np.bincount(self.labels, weights=self.weights, minlength=self.k)


def _check_size(K, P: WeightedPartition) -> np.ndarray:
    K = np.asarray(K, dtype=np.float64)
    if K.shape != (P.n, P.n):
        raise DataError(f"gram of shape {K.shape} does not match {P.n} points")
    return K


def wkk_gram(K, P: WeightedPartition) -> float:
    """Weighted kernel k-means objective from a gram matrix, summed cluster by cluster."""
    K = _check_size(K, P)
    s = P.cluster_weights()
    w = P.weights
    total = 0.0
    for j in range(P.k):
        idx = np.flatnonzero(P.labels == j)
        wj = w[idx]
        total += wj @ np.diag(K)[idx] - wj @ K[np.ix_(idx, idx)] @ wj / s[j]
    return float(total)


def indicator_matrix(P: WeightedPartition) -> np.ndarray:
    """``Y[i, j] = sqrt(w_i / s_j)`` if point ``i`` is in cluster ``j``, else 0."""
    Y = np.zeros((P.n, P.k))
    s = P.cluster_weights()
    Y[np.arange(P.n), P.labels] = np.sqrt(P.weights / s[P.labels])
    return Y


def wkk_trace_terms(K, P: WeightedPartition) -> tuple[float, float]:
    """``(tr(W^1/2 K W^1/2), tr(Y^T W^1/2 K W^1/2 Y))``; the objective is their difference."""
    K = _check_size(K, P)
    root = np.sqrt(P.weights)
    scaled = K * root[:, None] * root[None, :]
    Y = indicator_matrix(P)
    return float(np.trace(scaled)), float(np.trace(Y.T @ scaled @ Y))


def wkk_feature(data, P: WeightedPartition) -> float:
    """Weighted k-means objective with explicit features: ``sum w_i ||x_i - mean_j||^2``."""
    X = as_data_matrix(data)
    if X.shape[0] != P.n:
        raise DataError(f"data has {X.shape[0]} rows, partition has {P.n} points")
    total = 0.0
    for j in range(P.k):
        idx = P.labels == j
        w = P.weights[idx]
        center = w @ X[idx] / w.sum()
        total += w @ ((X[idx] - center) ** 2).sum(axis=1)
    return float(total)


def multiway_wkk_trace(K, m: int, P: WeightedPartition) -> float:
    """Weighted kernel k-means objective on the contracted biclique gram of ``K``."""
    first, second = wkk_trace_terms(biclique_gram_fast(K, m), P)
    return first - second


def _biclique_entry(K: np.ndarray, left: tuple[int, ...], right: tuple[int, ...]) -> float:
    return float(sum(K[a, b] for a in left for b in right))


def multiway_wkk_direct(K, m: int, P: WeightedPartition, max_tuples: int = DIRECT_MAX_TUPLES) -> float:
    """Multi-way objective by explicit enumeration of biclique kernel values.

    Every kernel evaluation pairs a point group ``(i, companions...)`` with
    ``(l, companions...)``, the ``m/2 - 1`` companions of each ranging
    independently over all ``n`` points.  No closed form is used.
    """
    require_even(m)
    K = _check_size(K, P)
    n = P.n
    if n**m > max_tuples:
        raise SizeGuardError(f"n**m = {n**m} tuples exceeds the limit {max_tuples}")
    h = m // 2
    companions = list(itertools.product(range(n), repeat=h - 1))

    def summed(i: int, l: int) -> float:
        return sum(
            _biclique_entry(K, (i,) + a, (l,) + b) for a in companions for b in companions
        )

    s = P.cluster_weights()
    w = P.weights
    total = 0.0
    for j in range(P.k):
        members = np.flatnonzero(P.labels == j)
        total += sum(w[i] * summed(i, i) for i in members)
        cross = sum(w[i] * w[l] * summed(i, l) for i in members for l in members)
        total -= cross / s[j]
    return float(total)


def psi_prime_features(data, m: int) -> np.ndarray:
    """Explicit features whose linear gram is the contracted biclique gram.

    ``psi_i = n**((m-2)/2) * (x_i + (m-2)/2 * mean(x))``.
    """
    require_even(m)
    X = as_data_matrix(data)
    n = X.shape[0]
    return float(n) ** ((m - 2) / 2) * (X + (m - 2) / 2 * X.mean(axis=0))


def psi_prime_objective(data, m: int, P: WeightedPartition) -> float:
    """Weighted k-means objective on :func:`psi_prime_features`."""
    return wkk_feature(psi_prime_features(data, m), P)
