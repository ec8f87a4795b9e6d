"""Spectral clustering on contracted biclique gram matrices.

The pipeline: base gram, contracted biclique gram, degree-normalized
operator ``D^-1/2 K D^-1/2``, its top-k eigenvectors, then k-means on the
eigenvector rows.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg
from threadpoolctl import threadpool_limits

from .errors import ConfigError, DataError, DegreeError, NumericalError
from .kernels import KernelSpec, biclique_gram_scaled, gram, shift_gram
from .matching import error_rate
from .tensor_core import require_even

__all__ = [
    "ClusteringResult",
    "Embedding",
    "KMeansResult",
    "SpectralOptions",
    "cluster_biclique",
    "cluster_matrix",
    "kmeans",
    "normalized_operator",
    "restart_seed",
    "sym_eigh_topk",
]

EIGEN_DRIVER = "evd"


@dataclass(frozen=True)
class Embedding:
    """Top eigenvectors (columns) and their eigenvalues in descending order."""

    vectors: np.ndarray
    eigenvalues: np.ndarray


def sym_eigh_topk(M, k: int) -> Embedding:
    """Top-k eigenpairs of a symmetric matrix by algebraic value.

    Uses a full dense decomposition.  Each eigenvector is signed so that its
    largest-magnitude entry (lowest index on ties) is positive.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DataError(f"matrix must be square, got {M.shape}")
    n = M.shape[0]
    if not 1 <= k <= n:
        raise ConfigError(f"k={k} outside 1..{n}")
    if not np.all(np.isfinite(M)):
        raise NumericalError("matrix has non-finite entries")
    scale = np.abs(M).max(initial=0.0)
    if np.abs(M - M.T).max(initial=0.0) > 1e-8 * max(scale, 1e-300):
        raise DataError("matrix is not symmetric")
    w, V = scipy.linalg.eigh(M, driver=EIGEN_DRIVER, check_finite=False)
    w = w[::-1][:k].copy()
    V = V[:, ::-1][:, :k].copy()
    pivots = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[pivots, np.arange(k)])
    signs[signs == 0] = 1.0
    return Embedding(V * signs, w)


def normalized_operator(K) -> np.ndarray:
    """``D^-1/2 K D^-1/2`` with ``D`` the row sums of ``K``, exactly symmetric."""
    K = np.asarray(K, dtype=np.float64)
    d = K.sum(axis=1)
    bad = np.flatnonzero(~(d > 0))
    if bad.size:
        i = int(bad[0])
        raise DegreeError(
            f"vertex {i} has nonpositive degree {d[i]:.6g}; "
            "consider shifting the gram matrix (shift_min_to_zero)"
        )
    s = 1 / np.sqrt(d)
    N = K * s[:, None] * s[None, :]
    return (N + N.T) / 2


def restart_seed(seed: int, restart: int) -> np.random.SeedSequence:
    """Independent seed stream for one restart, keyed by its index."""
    return np.random.SeedSequence(seed, spawn_key=(restart,))


def _sqdist(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    return ((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)


def _kmeanspp(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centers = [int(rng.integers(n))]
    d2 = ((X - X[centers[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = int(np.searchsorted(np.cumsum(d2), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        else:
            idx = int(rng.integers(n))
        centers.append(idx)
        d2 = np.minimum(d2, ((X - X[idx]) ** 2).sum(axis=1))
    return X[centers].copy()


def _update_centers(X, labels, C, k):
    counts = np.bincount(labels, minlength=k)
    sums = np.zeros_like(C)
    np.add.at(sums, labels, X)
    new = C.copy()
    filled = counts > 0
    new[filled] = sums[filled] / counts[filled, None]
    if not filled.all():
        # reseed each empty centroid at the point farthest from its own centroid
        far = ((X - new[labels]) ** 2).sum(axis=1)
        for j in np.flatnonzero(~filled):
            p = int(np.argmax(far))
            new[j] = X[p]
            far[p] = -1.0
    return new


def _lloyd(X, C, k, max_iters):
    labels = np.argmin(_sqdist(X, C), axis=1)
    for _ in range(max_iters):
        C = _update_centers(X, labels, C, k)
        new = np.argmin(_sqdist(X, C), axis=1)
        if np.array_equal(new, labels):
            break
        labels = new
    counts = np.bincount(labels, minlength=k)
    sums = np.zeros_like(C)
    np.add.at(sums, labels, X)
    centers = np.divide(sums, np.maximum(counts, 1)[:, None])
    objective = float(((X - centers[labels]) ** 2).sum())
    return labels, objective


@dataclass(frozen=True)
class KMeansResult:
    labels: np.ndarray
    objective: float
    restart_labels: np.ndarray
    restart_objectives: np.ndarray
    best_restart: int


def kmeans(points, k: int, restarts: int = 100, seed: int = 42, max_iters: int = 300) -> KMeansResult:
    """Lloyd's algorithm from k-means++ seeds, best of several restarts.

    Restart ``r`` draws from ``restart_seed(seed, r)`` so results do not depend
    on the order restarts are run in.  The restart with the lowest
    within-cluster sum of squares wins; ties go to the lowest index.
    """
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ConfigError(f"k={k} needs 1 <= k <= n={n}")
    if restarts < 1 or max_iters < 1:
        raise ConfigError("restarts and max_iters must be positive")
    all_labels = np.empty((restarts, n), dtype=np.int64)
    objectives = np.empty(restarts)
    for r in range(restarts):
        rng = np.random.default_rng(restart_seed(seed, r))
        labels, obj = _lloyd(X, _kmeanspp(X, k, rng), k, max_iters)
        all_labels[r] = labels
        objectives[r] = obj
    best = int(np.argmin(objectives))
    return KMeansResult(all_labels[best].copy(), float(objectives[best]), all_labels, objectives, best)


@dataclass(frozen=True)
class SpectralOptions:
    """Settings shared by every spectral pipeline.

    ``shift`` is applied to the matrix handed to degree normalization (the
    scaled contracted gram for the biclique path), before normalization.
    """

    restarts: int = 100
    seed: int = 42
    max_iters: int = 300
    row_normalize: bool = False
    shift: str = "none"
    shift_constant: float = 0.0


@dataclass(frozen=True)
class ClusteringResult:
    labels: np.ndarray
    embedding: Embedding
    kmeans_objective: float
    restart_objectives: np.ndarray
    restart_labels: np.ndarray
    restart_stats: dict
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "labels": self.labels.tolist(),
            "eigenvalues": self.embedding.eigenvalues.tolist(),
            "kmeans_objective": self.kmeans_objective,
            "restart_stats": self.restart_stats,
        }


def _restart_stats(km: KMeansResult) -> dict:
    agreement = np.array([1 - error_rate(lab, km.labels) for lab in km.restart_labels])
    return {
        "restarts": int(km.restart_objectives.size),
        "objective_mean": float(km.restart_objectives.mean()),
        "objective_std": float(km.restart_objectives.std()),
        "agreement_mean": float(agreement.mean()),
        "agreement_std": float(agreement.std()),
    }


def embed(M, k: int, opts: SpectralOptions = SpectralOptions()) -> Embedding:
    """Spectral embedding of an affinity matrix (shift, normalize, eigensolve)."""
    M = shift_gram(M, opts.shift, opts.shift_constant)
    with threadpool_limits(limits=1):
        emb = sym_eigh_topk(normalized_operator(M), k)
    return emb


def cluster_matrix(M, k: int, opts: SpectralOptions = SpectralOptions(), config: dict | None = None) -> ClusteringResult:
    """Spectral clustering of an affinity matrix."""
    emb = embed(M, k, opts)
    rows = emb.vectors
    if opts.row_normalize:
        norms = np.linalg.norm(rows, axis=1, keepdims=True)
        rows = np.divide(rows, norms, out=np.zeros_like(rows), where=norms > 0)
    km = kmeans(rows, k, opts.restarts, opts.seed, opts.max_iters)
    cfg = {"k": k, **asdict(opts), **(config or {})}
    return ClusteringResult(
        km.labels, emb, km.objective, km.restart_objectives, km.restart_labels, _restart_stats(km), cfg
    )


def biclique_affinity(data, spec: KernelSpec, m: int) -> np.ndarray:
    """Scaled contracted biclique gram of ``data`` (the clustering affinity)."""
    require_even(m)
    S, _ = biclique_gram_scaled(gram(data, spec), m)
    return S


def cluster_biclique(data, spec: KernelSpec, m: int, k: int, opts: SpectralOptions = SpectralOptions()) -> ClusteringResult:
    """Spectral clustering of ``data`` under the order-m biclique kernel."""
    config = {"modeling": "biclique", "kernel": spec.kind, **spec.params(), "m": m}
    return cluster_matrix(biclique_affinity(data, spec, m), k, opts, config)
