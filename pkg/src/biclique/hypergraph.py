"""Weighted m-uniform hypergraphs and their graph reductions.

An edge is a tuple of ``m`` vertex slots; a vertex may fill several slots
(a self-loop), and ``multiplicity[v, e]`` counts how often.  The index matrix
holds the square roots of these multiplicities, and the star expansion is
``H W H^T / m``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import (
    ConfigError,
    ContractConventionError,
    DataError,
    DegeneratePartitionError,
    NegativeWeightError,
)
from .tensor_core import (
    HALF_SYMMETRY_TOL,
    CubicalTensor,
    check_size,
    is_half_symmetric,
)

__all__ = [
    "UniformHypergraph",
    "adjacency_tensor",
    "clique_adjacencies",
    "cut_value",
    "degrees",
    "index_matrix",
    "kncut",
    "kncut_trace",
    "laplacians",
    "multiplicity_matrix",
    "ncut",
    "read_edge_list",
    "star_adjacency",
    "tensor_to_hypergraph",
    "write_edge_list",
]


@dataclass(frozen=True, eq=False)
class UniformHypergraph:
    """m-uniform hypergraph on vertices ``0..n-1``.

    Attributes
    ----------
    m : int
        Number of vertex slots per edge.
    n : int
        Number of vertices.
    vertices : ndarray of int, shape (E, m)
        Vertex slots of every edge.
    weights : ndarray, shape (E,)
        Strictly positive edge weights.
    """

    m: int
    n: int
    vertices: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ConfigError("a hypergraph needs m >= 1 and n >= 1")
        V = np.array(self.vertices, dtype=np.int64).reshape(-1, self.m)
        w = np.array(self.weights, dtype=np.float64).reshape(-1)
        if V.shape[0] != w.shape[0]:
            raise DataError("one weight per edge is required")
        if V.size and (V.min() < 0 or V.max() >= self.n):
            raise DataError(f"vertex index outside 0..{self.n - 1}")
        if np.any(~np.isfinite(w)) or np.any(w <= 0):
            raise NegativeWeightError("edge weights must be finite and positive")
        V.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "vertices", V)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_edges(cls, m: int, n: int, edges: Iterable) -> "UniformHypergraph":
        """Build from an iterable of ``(vertex_tuple, weight)`` pairs."""
        verts, weights = [], []
        for slots, weight in edges:
            if len(slots) != m:
                raise DataError(f"edge {tuple(slots)} does not have {m} slots")
            verts.append(tuple(slots))
            weights.append(weight)
        return cls(m, n, np.array(verts, dtype=np.int64).reshape(-1, m), np.array(weights))

    @property
    def num_edges(self) -> int:
        return self.vertices.shape[0]

    def edges(self) -> list[tuple[tuple[int, ...], float]]:
        return [(tuple(int(v) for v in row), float(w)) for row, w in zip(self.vertices, self.weights)]


def multiplicity_matrix(G: UniformHypergraph) -> np.ndarray:
    """``R[v, e]`` = number of slots of edge ``e`` filled by vertex ``v``."""
    R = np.zeros((G.n, G.num_edges))
    cols = np.repeat(np.arange(G.num_edges), G.m)
    np.add.at(R, (G.vertices.ravel(), cols), 1.0)
    return R


def index_matrix(G: UniformHypergraph) -> np.ndarray:
    """``H[v, e] = sqrt(multiplicity of v in e)``."""
    return np.sqrt(multiplicity_matrix(G))


def degrees(G: UniformHypergraph) -> np.ndarray:
    """Multiplicity-weighted degrees ``d_v = sum_e mult(v, e) * w(e)``."""
    return multiplicity_matrix(G) @ G.weights


def _hwh(G: UniformHypergraph) -> np.ndarray:
    H = index_matrix(G)
    M = (H * G.weights) @ H.T
    return (M + M.T) / 2


def star_adjacency(G: UniformHypergraph) -> np.ndarray:
    """Star-expansion adjacency ``H W H^T / m``."""
    return _hwh(G) / G.m


def clique_degrees(G: UniformHypergraph) -> np.ndarray:
    """``d_i = sum_{j != i} sum_{e containing i and j} w(e)``."""
    present = multiplicity_matrix(G) > 0
    others = present.sum(axis=0) - 1
    return (present * (others * G.weights)).sum(axis=1)


def clique_adjacencies(G: UniformHypergraph) -> tuple[np.ndarray, np.ndarray]:
    """Unnormalized and edge-normalized clique adjacencies ``(A_uc, A_nc)``.

    ``A_uc = H W H^T - D_uc`` and ``A_nc = H W (D_e - I)^{-1} H^T - D_v``,
    where every edge has size ``m`` so ``D_e - I = (m - 1) I``.
    """
    if G.m < 2:
        raise ConfigError("clique expansions need m >= 2")
    HWH = _hwh(G)
    A_uc = HWH - np.diag(clique_degrees(G))
    A_nc = HWH / (G.m - 1) - np.diag(degrees(G))
    return A_uc, A_nc


def laplacians(G: UniformHypergraph) -> dict[str, np.ndarray]:
    """Graph Laplacians ``diag(A 1) - A`` of the star and both clique adjacencies.

    For hypergraphs without self-loops, ``uc = m * star = (m - 1) * nc``.
    """
    A_uc, A_nc = clique_adjacencies(G)

    def lap(A):
        return np.diag(A.sum(axis=1)) - A

    return {"star": lap(star_adjacency(G)), "nc": lap(A_nc), "uc": lap(A_uc)}


def _as_index_set(n: int, V) -> np.ndarray:
    idx = np.unique(np.asarray(list(V), dtype=np.int64))
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise DataError(f"vertex index outside 0..{n - 1}")
    return idx


def cut_value(G: UniformHypergraph, V1, V2) -> float:
    """``sum_e w(e) |e & V1| |e & V2| / m`` with slots counted by multiplicity."""
    a = _as_index_set(G.n, V1)
    b = _as_index_set(G.n, V2)
    if np.intersect1d(a, b).size:
        raise ConfigError("cut sets must be disjoint")
    R = multiplicity_matrix(G)
    return float(np.sum(G.weights * R[a].sum(axis=0) * R[b].sum(axis=0)) / G.m)


def _partition_volumes(G: UniformHypergraph, labels) -> tuple[np.ndarray, np.ndarray, int]:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (G.n,):
        raise DataError(f"expected {G.n} labels, got shape {labels.shape}")
    k = int(labels.max()) + 1 if labels.size else 0
    if labels.min() < 0 or np.unique(labels).size != k:
        raise DegeneratePartitionError("labels must use every id in 0..k-1")
    if k < 2:
        raise DegeneratePartitionError("a normalized cut needs at least two parts")
    d = degrees(G)
    vol = np.bincount(labels, weights=d, minlength=k)
    if np.any(vol <= 0):
        j = int(np.argmin(vol))
        raise DegeneratePartitionError(f"part {j} has zero volume")
    return labels, vol, k


def ncut(G: UniformHypergraph, V1, V2) -> float:
    """Two-set normalized cut ``cut(V1, V2) * (1/vol(V1) + 1/vol(V2))``."""
    d = degrees(G)
    v1 = d[_as_index_set(G.n, V1)].sum()
    v2 = d[_as_index_set(G.n, V2)].sum()
    if v1 <= 0 or v2 <= 0:
        raise DegeneratePartitionError("both sets need positive volume")
    return cut_value(G, V1, V2) * (1 / v1 + 1 / v2)


def kncut(G: UniformHypergraph, labels) -> float:
    """k-way normalized cut ``sum_j cut(V_j, V \\ V_j) / vol(V_j)``.

    Each boundary is charged once per part.  For two parts this equals
    ``ncut(V1, V2)``.
    """
    labels, vol, k = _partition_volumes(G, labels)
    everyone = np.arange(G.n)
    total = 0.0
    for j in range(k):
        inside = everyone[labels == j]
        outside = everyone[labels != j]
        total += cut_value(G, inside, outside) / vol[j]
    return total


def kncut_trace(G: UniformHypergraph, labels) -> float:
    """Trace form ``tr(Z^T D^-1/2 L_s D^-1/2 Z)`` with ``Z_ij = sqrt(d_i / vol_j)``."""
    labels, vol, k = _partition_volumes(G, labels)
    # D^{-1/2} Z has entries 1/sqrt(vol_j) on the rows of part j
    scaled = np.zeros((G.n, k))
    scaled[np.arange(G.n), labels] = 1 / np.sqrt(vol[labels])
    L_s = np.diag(degrees(G)) - star_adjacency(G)
    return float(np.trace(scaled.T @ L_s @ scaled))


def _canonical_tuples(idx: np.ndarray, m: int) -> np.ndarray:
    """Sorted-halves canonical form of each row of ``idx`` (shape (N, m))."""
    h = m // 2
    first = np.sort(idx[:, :h], axis=1)
    second = np.sort(idx[:, h:], axis=1)
    # swap halves where the second half is lexicographically smaller
    swap = np.zeros(idx.shape[0], dtype=bool)
    undecided = np.ones(idx.shape[0], dtype=bool)
    for c in range(h):
        less = undecided & (second[:, c] < first[:, c])
        more = undecided & (second[:, c] > first[:, c])
        swap |= less
        undecided &= ~(less | more)
    lo = np.where(swap[:, None], second, first)
    hi = np.where(swap[:, None], first, second)
    return np.hstack([lo, hi])


def tensor_to_hypergraph(T: CubicalTensor) -> UniformHypergraph:
    """One edge per half-symmetry orbit of nonzero entries.

    The edge stores the canonical index tuple (each half sorted, smaller half
    first) and the common entry value as its weight.
    """
    m, n = T.order, T.dim
    if m % 2 or not is_half_symmetric(T, HALF_SYMMETRY_TOL):
        raise ContractConventionError("tensor_to_hypergraph needs a half-symmetric tensor")
    if np.any(T.entries < 0):
        raise NegativeWeightError(
            "tensor has negative entries; shift it (e.g. shift_min_to_zero) first"
        )
    check_size(n, m)
    idx = np.indices((n,) * m).reshape(m, -1).T
    reps = np.unique(_canonical_tuples(idx, m), axis=0)
    weights = T.entries[tuple(reps.T)]
    keep = weights > 0
    return UniformHypergraph(m, n, reps[keep], weights[keep])


def _orbit(slots: tuple[int, ...], symmetry: str) -> set[tuple[int, ...]]:
    m = len(slots)
    if symmetry == "full":
        return set(itertools.permutations(slots))
    h = m // 2
    a, b = slots[:h], slots[h:]
    out = set()
    for pa in itertools.permutations(a):
        for pb in itertools.permutations(b):
            out.add(pa + pb)
            out.add(pb + pa)
    return out


def adjacency_tensor(G: UniformHypergraph, symmetry: str = "full") -> CubicalTensor:
    """Dense adjacency tensor placing each edge weight on its whole orbit.

    ``symmetry="full"`` uses every slot permutation (undirected edges);
    ``"half"`` reads each edge as two halves and uses the half-symmetry group.
    Edges sharing an orbit add up.
    """
    if symmetry not in ("full", "half"):
        raise ConfigError("symmetry must be 'full' or 'half'")
    if symmetry == "half" and G.m % 2:
        raise ConfigError("half symmetry needs an even edge size")
    check_size(G.n, G.m)
    T = np.zeros((G.n,) * G.m)
    for slots, w in G.edges():
        for t in _orbit(slots, symmetry):
            T[t] += w
    return CubicalTensor(T)


def read_edge_list(path, n: int | None = None) -> UniformHypergraph:
    """Read ``v1 ... vm weight`` lines (0-based vertices, ``#`` comments)."""
    rows = []
    m = None
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if m is None:
            m = len(parts) - 1
        if len(parts) - 1 != m or m < 1:
            raise DataError(f"{path}:{lineno}: expected {m} vertices and a weight")
        try:
            slots = tuple(int(p) for p in parts[:-1])
            weight = float(parts[-1])
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from None
        rows.append((slots, weight))
    if m is None:
        raise DataError(f"{path}: no edges")
    if n is None:
        n = 1 + max(max(s) for s, _ in rows)
    return UniformHypergraph.from_edges(m, n, rows)


def write_edge_list(G: UniformHypergraph, path) -> None:
    lines = [" ".join(str(v) for v in slots) + f" {w!r}" for slots, w in G.edges()]
    Path(path).write_text("\n".join(lines) + "\n")
