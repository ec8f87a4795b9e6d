"""Randomized cross-checks between independent implementations.

Each check builds small random instances from a seed, computes the same
quantity two or more ways and reports the worst discrepancy.  The
command-line ``oracle-check`` runs them all.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import subspace_angles

from .hypergraph import (
    UniformHypergraph,
    adjacency_tensor,
    clique_adjacencies,
    clique_degrees,
    degrees,
    kncut,
    kncut_trace,
    star_adjacency,
    tensor_to_hypergraph,
)
from .kernels import biclique_gram_fast, biclique_gram_tensor, gram, KernelSpec
from .objectives import (
    WeightedPartition,
    multiway_wkk_direct,
    multiway_wkk_trace,
    psi_prime_objective,
    wkk_feature,
    wkk_gram,
)
from .spectral import normalized_operator, sym_eigh_topk
from .tensor_core import contract_biclique

__all__ = [
    "CheckResult",
    "check_cut_equivalence",
    "check_fast_vs_tensor",
    "check_objective_chain",
    "gram_tensor_star_angles",
    "random_partition",
    "random_uniform_hypergraph",
    "run_all",
    "top_subspace_angle",
]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    instances: int

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name}: worst={self.worst:.3e} tol={self.tolerance:.1e} "
                f"instances={self.instances}")


def random_symmetric(rng: np.random.Generator, n: int) -> np.ndarray:
    """Symmetric matrix with entries in [0, 1]."""
    A = rng.uniform(0.0, 1.0, (n, n))
    return np.triu(A) + np.triu(A, 1).T


def relative_error(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    scale = np.maximum(np.abs(b), np.finfo(float).tiny)
    return float(np.max(np.abs(a - b) / scale))


def check_fast_vs_tensor(seed: int = 0, sizes=range(2, 7), orders=(2, 4, 6), repeats: int = 50,
                         tol: float = 1e-10, perturb: float = 0.0) -> CheckResult:
    """Closed-form contracted gram against the explicit gram-tensor contraction.

    ``perturb`` is added to one entry of the closed form, which must then fail.
    """
    rng = np.random.default_rng(seed)
    worst, count = 0.0, 0
    for n in sizes:
        for m in orders:
            for _ in range(repeats):
                K = random_symmetric(rng, n)
                fast = biclique_gram_fast(K, m)
                if perturb:
                    fast = fast.copy()
                    fast[0, -1] += perturb
                slow = contract_biclique(biclique_gram_tensor(K, m))
                worst = max(worst, relative_error(fast, slow))
                count += 1
    return CheckResult("fast gram equals tensor contraction", worst <= tol, worst, tol, count)


def random_partition(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """Random labels using every id in ``0..k-1``."""
    labels = np.concatenate([np.arange(k), rng.integers(0, k, n - k)])
    return rng.permutation(labels)


def check_objective_chain(seed: int = 0, instances: int = 30, max_n: int = 12, m: int = 4,
                          tol: float = 1e-8) -> tuple[CheckResult, CheckResult]:
    """Multi-way objective three ways, and the plain objective two ways."""
    rng = np.random.default_rng(seed)
    worst_chain, worst_plain = 0.0, 0.0
    for _ in range(instances):
        n = int(rng.integers(3, max_n + 1))
        k = int(rng.integers(1, min(n - 1, 4) + 1))
        X = rng.normal(size=(n, int(rng.integers(1, 5))))
        P = WeightedPartition(random_partition(rng, n, k), rng.uniform(0.2, 3.0, n))
        K = gram(X, KernelSpec.linear())
        trace = multiway_wkk_trace(K, m, P)
        direct = multiway_wkk_direct(K, m, P)
        psi = psi_prime_objective(X, m, P)
        scale = max(abs(trace), np.finfo(float).tiny)
        worst_chain = max(worst_chain, abs(direct - trace) / scale, abs(psi - trace) / scale)
        plain = wkk_gram(K, P)
        worst_plain = max(worst_plain, abs(wkk_feature(X, P) - plain) / max(abs(plain), 1e-300))
    return (
        CheckResult("multi-way objective: direct = trace = feature form", worst_chain <= tol,
                    worst_chain, tol, instances),
        CheckResult("weighted kernel k-means: feature = gram form", worst_plain <= 1e-10,
                    worst_plain, 1e-10, instances),
    )


def random_uniform_hypergraph(rng: np.random.Generator, n: int, m: int, num_edges: int) -> UniformHypergraph:
    """Undirected hypergraph of edges with ``m`` distinct vertices and positive degrees."""
    while True:
        verts = np.array([np.sort(rng.choice(n, size=m, replace=False)) for _ in range(num_edges)])
        G = UniformHypergraph(m, n, verts, rng.uniform(0.5, 2.0, num_edges))
        if np.all(degrees(G) > 0):
            return G


def top_subspace_angle(A, B, k: int) -> float:
    """Largest principal angle between the top-k eigenspaces of two symmetric matrices."""
    return float(np.max(subspace_angles(sym_eigh_topk(A, k).vectors, sym_eigh_topk(B, k).vectors)))


def eigengap(M, k: int) -> float:
    w = np.linalg.eigvalsh(M)[::-1]
    return float(w[k - 1] - w[k]) if k < w.size else np.inf


def hypergraph_operators(G: UniformHypergraph) -> dict[str, np.ndarray]:
    """Degree-normalized star, clique and contracted-tensor operators of ``G``."""
    d_v = degrees(G)
    s_v = 1 / np.sqrt(d_v)
    s_uc = 1 / np.sqrt(clique_degrees(G))
    A_uc, A_nc = clique_adjacencies(G)

    def scale(A, s):
        N = A * s[:, None] * s[None, :]
        return (N + N.T) / 2

    return {
        "star": scale(star_adjacency(G), s_v),
        "nc": scale(A_nc, s_v),
        "uc": scale(A_uc, s_uc),
        "contracted": normalized_operator(contract_biclique(adjacency_tensor(G, "full"))),
    }


def check_cut_equivalence(seed: int = 0, instances: int = 20, m: int = 4, k: int = 2,
                          max_n: int = 6, tol: float = 1e-6, min_gap: float = 1e-3) -> tuple[CheckResult, CheckResult]:
    """Star / clique / contracted operators share top-k eigenspaces; cut equals its trace form.

    Instances whose star operator has an eigengap below ``min_gap`` after the
    k-th eigenvalue are redrawn, since their top-k eigenspace is not well
    defined numerically.
    """
    rng = np.random.default_rng(seed)
    worst_angle, worst_cut = 0.0, 0.0
    done = 0
    while done < instances:
        n = int(rng.integers(m + 1, max_n + 1))
        G = random_uniform_hypergraph(rng, n, m, int(rng.integers(n, 3 * n + 1)))
        ops = hypergraph_operators(G)
        if eigengap(ops["star"], k) < min_gap:
            continue
        for name in ("nc", "uc", "contracted"):
            worst_angle = max(worst_angle, top_subspace_angle(ops["star"], ops[name], k))
        labels = random_partition(rng, n, int(rng.integers(2, 4)))
        exact = kncut(G, labels)
        worst_cut = max(worst_cut, abs(exact - kncut_trace(G, labels)) / max(abs(exact), 1.0))
        done += 1
    return (
        CheckResult("star/clique/contracted eigenspaces agree", worst_angle < tol, worst_angle, tol, instances),
        CheckResult("normalized cut equals trace form", worst_cut <= 1e-10, worst_cut, 1e-10, instances),
    )


def gram_tensor_star_angles(seed: int = 0, instances: int = 20, n_values=(3, 4), m: int = 4,
                            k: int = 2) -> np.ndarray:
    """Angles between star-expansion and contracted-matrix eigenspaces for gram-tensor hypergraphs.

    The hypergraph has one edge per orbit of the gram tensor.  Returned for
    reporting: the two operators are not equivalent in general.
    """
    rng = np.random.default_rng(seed)
    angles = []
    for i in range(instances):
        n = n_values[i % len(n_values)]
        K = gram(rng.normal(size=(n, 2)), KernelSpec.gaussian(1.0))
        T = biclique_gram_tensor(K, m)
        G = tensor_to_hypergraph(T)
        s = 1 / np.sqrt(degrees(G))
        star = star_adjacency(G) * s[:, None] * s[None, :]
        contracted = contract_biclique(T) * s[:, None] * s[None, :]
        angles.append(top_subspace_angle((star + star.T) / 2, (contracted + contracted.T) / 2, k))
    return np.array(angles)


def run_all(seed: int = 0, perturb: float = 0.0) -> list[CheckResult]:
    results = [check_fast_vs_tensor(seed, perturb=perturb)]
    results += check_objective_chain(seed)
    results += check_cut_equivalence(seed)
    return results
