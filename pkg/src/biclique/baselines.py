"""Heuristic order-3 affinity tensors used as comparison modelings.

Each modeling defines a symmetric weight for every triple of points:

* ``gd-max``: the largest of the three pairwise kernel values.
* ``affine``: ``exp(-gamma * lambda_min(X^T X))`` for the d x 3 matrix ``X`` of
  the triple.
* ``dh2``: ``exp(-gamma * s)`` where ``s`` sums each point's distance to the
  line through the other two.
* ``gendot``: ``sum_l x_il x_jl x_kl``.

Clustering contracts the tensor over its third mode and runs the usual
normalized spectral step.  The contraction is accumulated slab by slab
(one leading index at a time) so the full ``n^3`` tensor is never stored.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import ConfigError
from .kernels import KernelSpec, as_data_matrix, gram
from .spectral import ClusteringResult, SpectralOptions, cluster_matrix
from .tensor_core import CubicalTensor, check_size

__all__ = [
    "MODELINGS",
    "affine_subspace_tensor",
    "cluster_order3",
    "dh2_tensor",
    "gd_max_tensor",
    "gendot_tensor",
    "order3_affinity",
]

MODELINGS = ("gd-max", "affine", "dh2", "gendot")


def _gd_max_slabs(data, spec: KernelSpec) -> tuple[int, Callable[[int], np.ndarray]]:
    K = gram(data, spec)

    def slab(i):
        return np.maximum(np.maximum(K[i][:, None], K), K[i][None, :])

    return K.shape[0], slab


def _affine_slabs(data, gamma: float) -> tuple[int, Callable[[int], np.ndarray]]:
    X = as_data_matrix(data)
    G = gram(X, KernelSpec.linear())
    n = G.shape[0]

    def slab(i):
        # 3x3 gram of (x_i, x_j, x_k) for every (j, k)
        M = np.empty((n, n, 3, 3))
        M[:, :, 0, 0] = G[i, i]
        M[:, :, 0, 1] = M[:, :, 1, 0] = G[i][:, None]
        M[:, :, 0, 2] = M[:, :, 2, 0] = G[i][None, :]
        M[:, :, 1, 1] = np.diag(G)[:, None]
        M[:, :, 2, 2] = np.diag(G)[None, :]
        M[:, :, 1, 2] = M[:, :, 2, 1] = G
        smallest = np.linalg.eigvalsh(M)[:, :, 0]
        return np.exp(-gamma * np.maximum(smallest, 0.0))

    return n, slab


def line_distance_sq(d_pa: np.ndarray, d_pb: np.ndarray, d_ab: np.ndarray) -> np.ndarray:
    """Squared distance from ``p`` to the line through ``a`` and ``b``.

    Inputs are squared pairwise distances.  When ``a == b`` the line is the
    single point ``a``.
    """
    dot = (d_pa + d_ab - d_pb) / 2  # (p - a) . (b - a)
    with np.errstate(divide="ignore", invalid="ignore"):
        proj = np.where(d_ab > 0, dot * dot / d_ab, 0.0)
    return np.maximum(d_pa - proj, 0.0)


def _dh2_slabs(data, gamma: float) -> tuple[int, Callable[[int], np.ndarray]]:
    X = as_data_matrix(data)
    sq = np.maximum(-2 * gram(X, KernelSpec.linear()) + np.sum(X * X, axis=1)[:, None]
                    + np.sum(X * X, axis=1)[None, :], 0.0)
    np.fill_diagonal(sq, 0.0)
    n = X.shape[0]

    def slab(i):
        dij = sq[i][:, None]
        dik = sq[i][None, :]
        djk = sq
        total = (np.sqrt(line_distance_sq(dij, dik, djk))
                 + np.sqrt(line_distance_sq(dij, djk, dik))
                 + np.sqrt(line_distance_sq(dik, djk, dij)))
        return np.exp(-gamma * total)

    return n, slab


def _gendot_slabs(data) -> tuple[int, Callable[[int], np.ndarray]]:
    X = as_data_matrix(data)

    def slab(i):
        return (X * X[i]) @ X.T

    return X.shape[0], slab


def _slabs(data, modeling: str, spec: KernelSpec | None, gamma: float | None):
    if modeling == "gd-max":
        if spec is None:
            raise ConfigError("gd-max needs a base kernel")
        return _gd_max_slabs(data, spec)
    if modeling in ("affine", "dh2"):
        if gamma is None or gamma < 0:
            raise ConfigError(f"{modeling} needs gamma >= 0")
        return (_affine_slabs if modeling == "affine" else _dh2_slabs)(data, gamma)
    if modeling == "gendot":
        return _gendot_slabs(data)
    raise ConfigError(f"unknown modeling {modeling!r}; expected one of {MODELINGS}")


def _full_tensor(n: int, slab) -> CubicalTensor:
    check_size(n, 3)
    return CubicalTensor(np.stack([slab(i) for i in range(n)]))


def gd_max_tensor(data, spec: KernelSpec) -> CubicalTensor:
    return _full_tensor(*_gd_max_slabs(data, spec))


def affine_subspace_tensor(data, gamma: float) -> CubicalTensor:
    return _full_tensor(*_slabs(data, "affine", None, gamma))


def dh2_tensor(data, gamma: float) -> CubicalTensor:
    return _full_tensor(*_slabs(data, "dh2", None, gamma))


def gendot_tensor(data) -> CubicalTensor:
    return _full_tensor(*_gendot_slabs(data))


def order3_affinity(data, modeling: str, spec: KernelSpec | None = None, gamma: float | None = None,
                    sample_edges: int | None = None, sample_seed: int = 0) -> np.ndarray:
    """Order-3 tensor contracted over its third mode.

    Equals ``contract_gd`` of the full tensor.  With ``sample_edges`` only
    that many uniformly drawn triples (with replacement) contribute, each
    to all six index orderings.
    """
    n, slab = _slabs(data, modeling, spec, gamma)
    if sample_edges is None:
        return np.stack([slab(i).sum(axis=1) for i in range(n)])
    rng = np.random.default_rng(sample_seed)
    triples = rng.integers(0, n, size=(int(sample_edges), 3))
    M = np.zeros((n, n))
    for i in np.unique(triples[:, 0]):
        rows = triples[triples[:, 0] == i]
        j, k = rows[:, 1], rows[:, 2]
        w = slab(i)[j, k]
        ii = np.full_like(j, i)
        for a, b in ((ii, j), (j, ii), (ii, k), (k, ii), (j, k), (k, j)):
            np.add.at(M, (a, b), w)
    # equal in exact arithmetic; averaging removes accumulation-order rounding
    return (M + M.T) / 2


def cluster_order3(data, modeling: str, k: int, opts: SpectralOptions = SpectralOptions(),
                   spec: KernelSpec | None = None, gamma: float | None = None,
                   sample_edges: int | None = None) -> ClusteringResult:
    """Spectral clustering on a contracted order-3 heuristic tensor.

    For ``gendot`` with negative entries the full tensor is shifted so its
    smallest entry becomes zero, unless ``opts.shift`` says otherwise.
    """
    X = as_data_matrix(data)
    M = order3_affinity(X, modeling, spec, gamma, sample_edges, opts.seed)
    if modeling == "gendot" and opts.shift == "none" and sample_edges is None:
        n, slab = _gendot_slabs(X)
        low = min(float(slab(i).min()) for i in range(n))
        if low < 0:
            M = M - n * low
    config = {"modeling": modeling, "m": 3}
    if spec is not None:
        config.update({"kernel": spec.kind, **spec.params()})
    if gamma is not None:
        config["gamma"] = gamma
    return cluster_matrix(M, k, opts, config)
