"""Spectral clustering of data modeled as even-order uniform hypergraphs via biclique kernels."""

from .errors import (
    BicliqueError,
    ConfigError,
    DataError,
    DegreeError,
    NumericalError,
    OracleViolation,
)
from .evaluation import EvalReport, SweepConfig, sweep
from .hypergraph import UniformHypergraph
from .kernels import KernelSpec, biclique_gram_fast, gram
from .spectral import ClusteringResult, SpectralOptions, cluster_biclique, cluster_matrix
from .tensor_core import CubicalTensor

__all__ = [
    "BicliqueError",
    "ClusteringResult",
    "ConfigError",
    "CubicalTensor",
    "DataError",
    "DegreeError",
    "EvalReport",
    "KernelSpec",
    "NumericalError",
    "OracleViolation",
    "SpectralOptions",
    "SweepConfig",
    "UniformHypergraph",
    "biclique_gram_fast",
    "cluster_biclique",
    "cluster_matrix",
    "gram",
    "sweep",
]

__version__ = "0.1.0"
