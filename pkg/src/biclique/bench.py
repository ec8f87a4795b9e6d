"""Wall-clock measurements of the closed-form gram and the full pipeline."""

from __future__ import annotations

import time

import numpy as np

from .kernels import KernelSpec, biclique_gram_scaled, gram
from .spectral import SpectralOptions, cluster_biclique

__all__ = ["best_time", "blobs", "gram_timings", "loglog_slope", "pipeline_timings"]


def best_time(fn, repeats: int = 3) -> float:
    """Minimum wall time of ``fn()`` over ``repeats`` calls, after one untimed warm-up call."""
    fn()
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return float(best)


def blobs(n: int, k: int = 3, d: int = 2, seed: int = 0) -> np.ndarray:
    """``n`` points in ``k`` unit-variance Gaussian clusters with centers 10 apart."""
    rng = np.random.default_rng(seed)
    centers = 10.0 * np.eye(k, d) if d >= k else rng.normal(scale=10.0, size=(k, d))
    return centers[np.arange(n) % k] + rng.normal(size=(n, d))


def gram_timings(n: int, m_values, repeats: int = 3, seed: int = 0) -> list[dict]:
    """Time the closed-form contracted gram for each order at fixed ``n``."""
    K = gram(blobs(n, seed=seed), KernelSpec.gaussian(1.0))
    return [{"n": n, "m": m, "seconds": best_time(lambda: biclique_gram_scaled(K, m), repeats)}
            for m in m_values]


def pipeline_timings(n_values, m: int = 4, k: int = 3, restarts: int = 1, repeats: int = 3,
                     seed: int = 0) -> list[dict]:
    """Time the whole clustering pipeline (gram, eigensolver, k-means) for each ``n``."""
    opts = SpectralOptions(restarts=restarts, seed=seed)
    rows = []
    for n in n_values:
        X = blobs(n, k, seed=seed)
        seconds = best_time(lambda: cluster_biclique(X, KernelSpec.gaussian(1.0), m, k, opts), repeats)
        rows.append({"n": n, "m": m, "restarts": restarts, "seconds": seconds})
    return rows


def loglog_slope(sizes, seconds) -> float:
    """Least-squares slope of log(seconds) against log(size)."""
    return float(np.polyfit(np.log(sizes), np.log(seconds), 1)[0])
