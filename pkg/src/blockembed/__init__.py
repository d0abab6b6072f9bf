"""Spectral embedding and square-error clustering for blockmodel graphs.

The pipeline: sample (or load) a graph, embed its adjacency or normalized
Laplacian via a truncated SVD, cluster the embedded rows by square error,
then estimate model parameters and verify concentration / separation bounds
against the sample.
"""

from .clustering import Clustering, assign_blocks, cluster_exact, cluster_mse
from .inference import (
    EstimationReport,
    MisclassificationResult,
    ProcrustesResult,
    adjusted_rand_index,
    align_factors,
    estimate_params,
    misclassification,
    procrustes_align,
)
from .sbm import (
    BlockAssignment,
    BlockModel,
    Graph,
    ModelConstants,
    RdpgFactors,
    compute_constants,
    edge_probability_matrix,
    factorize_p,
    sample_graph,
    sample_tau,
)
from .spectral import (
    EdgeProbMatrix,
    Embedding,
    SvdResult,
    augment_diagonal,
    embed_adjacency,
    embed_laplacian,
    embed_matrix,
    estimate_rank,
    svd,
)

__version__ = "0.1.0"

__all__ = [
    "BlockAssignment",
    "BlockModel",
    "Clustering",
    "EdgeProbMatrix",
    "Embedding",
    "EstimationReport",
    "Graph",
    "MisclassificationResult",
    "ModelConstants",
    "ProcrustesResult",
    "RdpgFactors",
    "SvdResult",
    "adjusted_rand_index",
    "align_factors",
    "assign_blocks",
    "augment_diagonal",
    "cluster_exact",
    "cluster_mse",
    "compute_constants",
    "edge_probability_matrix",
    "embed_adjacency",
    "embed_laplacian",
    "embed_matrix",
    "estimate_params",
    "estimate_rank",
    "factorize_p",
    "misclassification",
    "procrustes_align",
    "sample_graph",
    "sample_tau",
    "svd",
    "__version__",
]
