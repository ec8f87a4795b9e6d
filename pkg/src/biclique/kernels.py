"""Base kernels, gram matrices and biclique kernels.

The biclique kernel of order ``m`` compares two groups of ``m/2`` points by
summing the base kernel over every cross pair.  Its contracted gram matrix has
a closed form in terms of the base gram ``K``, its row sums ``delta`` and its
total ``rho``, which costs O(n^2) regardless of ``m``:

    K_m[i, j] = n**(m-2) * (K[i, j] + (m-2)/(2n) * (delta[i] + delta[j])
                            + (m-2)**2/(4 n**2) * rho)

The factor ``n**(m-2)`` overflows for large ``n`` and ``m``, so the matrix is
normally carried in scaled form together with the exponent of ``n``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import ConfigError, DataError, NumericalError, OrderParityError
from .tensor_core import CubicalTensor, check_size, require_even

__all__ = [
    "KernelSpec",
    "as_data_matrix",
    "base_kernel_eval",
    "biclique_eval",
    "biclique_gram_fast",
    "biclique_gram_scaled",
    "biclique_gram_tensor",
    "gram",
    "shift_gram",
    "symmetric_gram_exact",
    "symmetric_gram_fast",
    "symmetric_gram_tensor",
]

KINDS = ("gaussian", "polynomial", "linear")


@dataclass(frozen=True)
class KernelSpec:
    """Base kernel choice.

    ``gaussian``: exp(-gamma * ||x - y||^2).
    ``polynomial``: (<x, y> + offset) ** degree.
    ``linear``: <x, y>.
    """

    kind: str
    gamma: float | None = None
    degree: int | None = None
    offset: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown kernel kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "gaussian":
            if self.gamma is None or not self.gamma > 0:
                raise ConfigError("gaussian kernel requires gamma > 0")
        if self.kind == "polynomial":
            if self.degree is None or int(self.degree) != self.degree or self.degree < 1:
                raise ConfigError("polynomial kernel requires an integer degree >= 1")

    @classmethod
    def gaussian(cls, gamma: float) -> "KernelSpec":
        return cls("gaussian", gamma=float(gamma))

    @classmethod
    def polynomial(cls, degree: int, offset: float = 0.0) -> "KernelSpec":
        return cls("polynomial", degree=int(degree), offset=float(offset))

    @classmethod
    def linear(cls) -> "KernelSpec":
        return cls("linear")

    def params(self) -> dict:
        """Parameters relevant to ``kind``, for reports."""
        if self.kind == "gaussian":
            return {"gamma": self.gamma}
        if self.kind == "polynomial":
            return {"degree": self.degree, "offset": self.offset}
        return {}


def as_data_matrix(data) -> np.ndarray:
    """Validate and return ``data`` as a finite float64 array of shape (n, d)."""
    X = np.asarray(data, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise DataError(f"data must be a non-empty n x d matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        bad = np.argwhere(~np.isfinite(X))[0]
        raise DataError(f"non-finite value at row {bad[0]}, column {bad[1]}")
    return X


def base_kernel_eval(spec: KernelSpec, x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ConfigError(f"vector shapes differ: {x.shape} vs {y.shape}")
    if spec.kind == "gaussian":
        diff = x - y
        value = np.exp(-spec.gamma * np.dot(diff, diff))
    elif spec.kind == "polynomial":
        value = (np.dot(x, y) + spec.offset) ** spec.degree
    else:
        value = np.dot(x, y)
    if not np.isfinite(value):
        raise NumericalError("kernel value is not finite")
    return float(value)


def _mirror_upper(G: np.ndarray) -> np.ndarray:
    return np.triu(G) + np.triu(G, 1).T


def gram(data, spec: KernelSpec) -> np.ndarray:
    """Base-kernel gram matrix of the rows of ``data``; exactly symmetric."""
    X = as_data_matrix(data)
    if spec.kind == "gaussian":
        sq = squareform(pdist(X, "sqeuclidean"))
        K = np.exp(-spec.gamma * sq)
    else:
        K = _mirror_upper(X @ X.T)
        if spec.kind == "polynomial":
            K = (K + spec.offset) ** spec.degree
    if not np.all(np.isfinite(K)):
        raise NumericalError(f"gram matrix for {spec} has non-finite entries")
    return K


def biclique_eval(spec: KernelSpec, xs: Sequence, ts: Sequence) -> float:
    """Biclique kernel between two groups of points of equal size."""
    if len(xs) != len(ts) or len(xs) < 1:
        raise ConfigError("both groups must be non-empty and of equal size")
    return float(sum(base_kernel_eval(spec, x, t) for x in xs for t in ts))


def _check_gram(K) -> np.ndarray:
    K = np.asarray(K, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1] or K.shape[0] < 1:
        raise DataError(f"gram matrix must be square and non-empty, got {K.shape}")
    if not np.all(np.isfinite(K)):
        raise NumericalError("gram matrix has non-finite entries")
    return K


def biclique_gram_scaled(K, m: int) -> tuple[np.ndarray, int]:
    """Contracted biclique gram matrix in scaled form.

    Returns ``(S, e)`` with ``biclique_gram_fast(K, m) == S * n**e``.  Degree
    normalization cancels the scale, so clustering uses ``S`` directly.
    """
    require_even(m)
    K = _check_gram(K)
    if m == 2:
        return K.copy(), 0
    n = K.shape[0]
    delta = K.sum(axis=1)
    rho = delta.sum()
    a = (m - 2) / (2 * n)
    b = (m - 2) ** 2 / (4 * n * n)
    S = K + a * (delta[:, None] + delta[None, :]) + b * rho
    return S, m - 2


def biclique_gram_fast(K, m: int) -> np.ndarray:
    """Contracted biclique gram matrix at full scale."""
    S, e = biclique_gram_scaled(K, m)
    if e == 0:
        return S
    return S * float(S.shape[0]) ** e


def biclique_gram_tensor(K, m: int) -> CubicalTensor:
    """Dense gram tensor of the biclique kernel (reference only)."""
    require_even(m)
    K = _check_gram(K)
    n = K.shape[0]
    check_size(n, m)
    h = m // 2
    T = np.zeros((n,) * m)
    for g in range(h):
        for v in range(h, m):
            shape = [1] * m
            shape[g] = n
            shape[v] = n
            T += K.reshape(shape)
    return CubicalTensor(T)


def symmetric_gram_fast(K, m: int) -> np.ndarray:
    """Closed form stated for the fully symmetric modeling.

    ``(n**(m-2)/4) * (K + (m-1)/n * (delta_i + delta_j) + (m-1)**2/n**2 * rho)``.
    This is a valid (positive semidefinite) gram matrix but it does not equal
    the contraction of :func:`symmetric_gram_tensor`; see
    :func:`symmetric_gram_exact` for that.
    """
    require_even(m)
    if m < 4:
        raise OrderParityError("the symmetric modeling needs m >= 4")
    K = _check_gram(K)
    n = K.shape[0]
    delta = K.sum(axis=1)
    rho = delta.sum()
    inner = K + (m - 1) / n * (delta[:, None] + delta[None, :]) + (m - 1) ** 2 / n**2 * rho
    return float(n) ** (m - 2) / 4 * inner


def symmetric_gram_tensor(K, m: int) -> CubicalTensor:
    """Dense tensor ``(1/4) * sum_{p,q} K[i_p, i_q]`` over all slot pairs."""
    require_even(m)
    K = _check_gram(K)
    n = K.shape[0]
    check_size(n, m)
    T = np.zeros((n,) * m)
    diag = np.diag(K)
    for p in range(m):
        shape = [1] * m
        shape[p] = n
        T += diag.reshape(shape) / 4
    for p, q in itertools.permutations(range(m), 2):
        shape = [1] * m
        shape[p] = n
        shape[q] = n
        block = K if p < q else K.T
        T += block.reshape(shape) / 4
    return CubicalTensor(T)


def symmetric_gram_exact(K, m: int) -> np.ndarray:
    """Closed form of the one-per-half contraction of :func:`symmetric_gram_tensor`."""
    require_even(m)
    if m < 4:
        raise OrderParityError("the symmetric modeling needs m >= 4")
    K = _check_gram(K)
    n = K.shape[0]
    delta = K.sum(axis=1)
    rho = delta.sum()
    diag = np.diag(K)
    inner = (
        2 * K
        + diag[:, None]
        + diag[None, :]
        + 2 * (m - 2) / n * (delta[:, None] + delta[None, :])
        + (m - 2) / n * np.trace(K)
        + (m - 2) * (m - 3) / n**2 * rho
    )
    return float(n) ** (m - 2) / 4 * inner


def shift_gram(K, mode: str = "none", constant: float = 0.0) -> np.ndarray:
    """Add one constant to every entry.

    ``mode`` is ``"none"``, ``"shift_min_to_zero"`` or ``"add_constant"``.
    """
    K = np.asarray(K, dtype=np.float64)
    if mode == "none":
        return K
    if mode == "shift_min_to_zero":
        return K - K.min()
    if mode == "add_constant":
        return K + constant
    raise ConfigError(f"unknown shift mode {mode!r}")
