"""Dense cubical tensors used as small-scale reference implementations.

A cubical tensor of order ``m`` and dimension ``n`` stores ``n**m`` entries in
row-major order.  Nothing in the production clustering path builds one; they
exist so that closed-form matrix formulas can be checked against explicit
contractions.  Index positions ("modes") are 1-based in docstrings and
0-based in code.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import (
    ConfigError,
    ContractConventionError,
    OrderParityError,
    SizeGuardError,
)

__all__ = [
    "CubicalTensor",
    "contract_biclique",
    "contract_gd",
    "contract_modes",
    "get_max_entries",
    "is_half_symmetric",
    "mode_k_product",
    "oracle_guard",
    "poly_eval",
    "semidefinite_probe",
    "set_max_entries",
]

DEFAULT_MAX_ENTRIES = 10_000_000
HALF_SYMMETRY_TOL = 1e-9

_max_entries = DEFAULT_MAX_ENTRIES


def get_max_entries() -> int:
    """Current budget on the number of dense tensor entries."""
    return _max_entries


def set_max_entries(limit: int) -> None:
    """Set the dense tensor entry budget (``oracle.max_entries``)."""
    global _max_entries
    limit = int(limit)
    if limit < 1:
        raise ConfigError("oracle.max_entries must be positive")
    _max_entries = limit


@contextlib.contextmanager
def oracle_guard(limit: int) -> Iterator[None]:
    """Temporarily override the dense tensor entry budget."""
    previous = _max_entries
    set_max_entries(limit)
    try:
        yield
    finally:
        set_max_entries(previous)


def check_size(n: int, m: int) -> None:
    """Raise SizeGuardError when an order-m, dimension-n tensor is too large."""
    count = n**m
    if count > _max_entries:
        raise SizeGuardError(
            f"dense tensor with n={n}, m={m} has {count} entries, "
            f"above oracle.max_entries={_max_entries}"
        )


def require_even(m: int) -> None:
    if m < 2 or m % 2:
        raise OrderParityError(f"order must be even and >= 2, got {m}")


@dataclass(frozen=True, eq=False)
class CubicalTensor:
    """Dense tensor with all modes of equal length.

    Parameters
    ----------
    entries : ndarray
        Array of shape ``(n,) * m``.  A read-only float64 copy is stored.
    """

    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.float64, copy=True)
        if arr.ndim < 1:
            raise ConfigError("a tensor needs at least one mode")
        if len(set(arr.shape)) != 1:
            raise ConfigError(f"tensor modes differ in length: {arr.shape}")
        if arr.shape[0] < 1:
            raise ConfigError("tensor dimension must be at least 1")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def from_flat(cls, order: int, dim: int, values) -> "CubicalTensor":
        values = np.asarray(values, dtype=np.float64)
        if values.size != dim**order:
            raise ConfigError(
                f"expected {dim**order} entries for order {order}, dim {dim}; "
                f"got {values.size}"
            )
        return cls(values.reshape((dim,) * order))

    @property
    def order(self) -> int:
        return self.entries.ndim

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.entries.ravel()))


def _half_symmetry_generators(m: int) -> list[tuple[int, ...]]:
    """Axis permutations generating the half-symmetry group.

    Adjacent transpositions inside each half plus the swap of the halves
    generate every permutation in the group, so invariance under these
    implies invariance under all of them.
    """
    h = m // 2
    identity = list(range(m))
    gens = []
    for start in (0, h):
        for a in range(start, start + h - 1):
            perm = identity.copy()
            perm[a], perm[a + 1] = perm[a + 1], perm[a]
            gens.append(tuple(perm))
    gens.append(tuple(list(range(h, m)) + list(range(h))))
    return gens


def is_half_symmetric(T: CubicalTensor, tol: float = 0.0) -> bool:
    """True if ``T`` is invariant under within-half permutations and the half swap.

    Entries are compared with absolute tolerance ``tol``.
    """
    require_even(T.order)
    E = T.entries
    for perm in _half_symmetry_generators(T.order):
        if np.any(np.abs(E - E.transpose(perm)) > tol):
            return False
    return True


def mode_k_product(T: CubicalTensor, k: int, v) -> CubicalTensor:
    """Contract mode ``k`` (1-based) of ``T`` with the vector ``v``.

    The contracted mode is dropped, so the result has order ``T.order - 1``.
    """
    if not 1 <= k <= T.order:
        raise ConfigError(f"mode {k} out of range 1..{T.order}")
    if T.order < 2:
        raise ConfigError("cannot contract the only mode of an order-1 tensor")
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (T.dim,):
        raise ConfigError(f"vector length {v.shape} does not match dimension {T.dim}")
    return CubicalTensor(np.tensordot(T.entries, v, axes=([k - 1], [0])))


def contract_modes(T: CubicalTensor, free: tuple[int, int]) -> np.ndarray:
    """Sum every mode except the two 1-based ``free`` modes against all-ones.

    Modes are contracted one at a time from the highest index down, each by
    :func:`mode_k_product`.  The result is indexed ``[free[0], free[1]]``.
    """
    p, q = free
    m = T.order
    if p == q or not (1 <= p <= m and 1 <= q <= m):
        raise ConfigError(f"invalid free modes {free} for order {m}")
    check_size(T.dim, m)
    ones = np.ones(T.dim)
    out = T
    for k in range(m, 0, -1):
        if k not in (p, q):
            out = mode_k_product(out, k, ones)
    M = np.array(out.entries)
    return M if p < q else M.T.copy()


def contract_biclique(T: CubicalTensor) -> np.ndarray:
    """Contracted matrix of a half-symmetric tensor, one free mode per half.

    ``M[i, j]`` sums ``T[i, i2.., j, j2..]`` over every index except the first
    of each half (modes 1 and m/2 + 1).  The result is averaged with its
    transpose so that it is exactly symmetric regardless of summation order.
    """
    require_even(T.order)
    check_size(T.dim, T.order)
    if T.order == 2:
        return np.array(T.entries)
    if not is_half_symmetric(T, HALF_SYMMETRY_TOL):
        raise ContractConventionError(
            "contract_biclique requires a half-symmetric tensor"
        )
    M = contract_modes(T, (1, T.order // 2 + 1))
    return (M + M.T) / 2


def contract_gd(T: CubicalTensor) -> np.ndarray:
    """Contracted matrix with modes 1 and 2 free; defined for any order >= 2."""
    if T.order < 2:
        raise ConfigError("contract_gd needs order >= 2")
    check_size(T.dim, T.order)
    if T.order == 2:
        return np.array(T.entries)
    return contract_modes(T, (1, 2))


def poly_eval(T: CubicalTensor, x) -> float:
    """Evaluate the homogeneous polynomial ``sum T[i1..im] x[i1]...x[im]``."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (T.dim,):
        raise ConfigError(f"vector length {x.shape} does not match dimension {T.dim}")
    out = T.entries
    for _ in range(T.order):
        out = np.tensordot(x, out, axes=([0], [0]))
    return float(out)


def semidefinite_probe(T: CubicalTensor, trials: int = 1000, seed: int = 0) -> bool:
    """Randomized check that ``poly_eval(T, x) >= 0`` on sampled directions.

    Draws ``trials`` vectors uniform in ``[-1, 1]^n`` and accepts values down
    to ``-1e-8 * ||T||_F``.  A passing probe is evidence, not a proof.
    """
    require_even(T.order)
    n, m = T.dim, T.order
    X = np.random.default_rng(seed).uniform(-1.0, 1.0, size=(trials, n))
    R = X @ T.entries.reshape(n, -1)
    for _ in range(m - 1):
        R = np.einsum("ti,tir->tr", X, R.reshape(trials, n, -1))
    values = R[:, 0]
    return bool(np.all(values >= -1e-8 * T.frobenius_norm()))
