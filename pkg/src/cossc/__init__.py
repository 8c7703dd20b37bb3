"""Semi-supervised clustering by sparse graph partitioning.

The pipeline builds a mutual-kNN similarity graph, scales must-link edge
weights, minimizes a trace-relaxed partitioning objective by block coordinate
descent, and reads clusters off the surviving graph's connected components.
``COSSC`` wraps the pipeline as a scikit-learn estimator; the functional
surface lives in the submodules.
"""

__version__ = "0.1.0"

from .baseline import KMeansResult, kmeans_lloyd, sca_similarity, spectral_cluster
from .data import (
    IDEAL_CLUSTERS,
    Shape,
    SyntheticSpec,
    generate,
    load_edges,
    load_labels,
    load_mustlinks,
    load_points,
    sample_mustlinks_uniform,
    sample_mustlinks_within,
    save_edges,
    save_labels,
    save_mustlinks,
    save_points,
    save_report,
)
from .estimator import COSSC, SCABaseline
from .extract import ClusterAssignment, cross_check_rank, extract_clusters
from .graph import (
    MustLinkSet,
    SimilarityGraph,
    auto_neighbor_count,
    build_knn_similarity,
    connected_components,
    row_normalize_symmetrize,
    scale_must_links,
    validate_mustlinks,
)
from .linalg import (
    SpectrumResult,
    laplacian,
    laplacian_adjoint_entry,
    numerical_rank,
    smallest_eigpairs,
)
from .metrics import EvalReport, accuracy, nmi, rmv
from .model import EdgeIndicator, edge_stretch, grad_z, h_step, objective, z_step
from .oracle import (
    OracleResult,
    TheoremVerdict,
    brute_force_mip,
    compute_beta_bar,
    phi,
    verify_mustlink_theorem,
)
from .solver import (
    BlockwiseReport,
    SolverConfig,
    SolverTrace,
    Termination,
    check_blockwise,
    cossc_solve,
    default_h0,
)

__all__ = [
    "__version__",
    "COSSC",
    "SCABaseline",
    "BlockwiseReport",
    "ClusterAssignment",
    "EdgeIndicator",
    "EvalReport",
    "IDEAL_CLUSTERS",
    "KMeansResult",
    "MustLinkSet",
    "OracleResult",
    "Shape",
    "SimilarityGraph",
    "SolverConfig",
    "SolverTrace",
    "SpectrumResult",
    "SyntheticSpec",
    "Termination",
    "TheoremVerdict",
    "accuracy",
    "auto_neighbor_count",
    "brute_force_mip",
    "build_knn_similarity",
    "check_blockwise",
    "compute_beta_bar",
    "connected_components",
    "cossc_solve",
    "cross_check_rank",
    "default_h0",
    "edge_stretch",
    "extract_clusters",
    "generate",
    "grad_z",
    "h_step",
    "kmeans_lloyd",
    "laplacian",
    "laplacian_adjoint_entry",
    "load_edges",
    "load_labels",
    "load_mustlinks",
    "load_points",
    "nmi",
    "numerical_rank",
    "objective",
    "phi",
    "rmv",
    "row_normalize_symmetrize",
    "sample_mustlinks_uniform",
    "sample_mustlinks_within",
    "save_edges",
    "save_labels",
    "save_mustlinks",
    "save_points",
    "save_report",
    "sca_similarity",
    "scale_must_links",
    "smallest_eigpairs",
    "spectral_cluster",
    "validate_mustlinks",
    "verify_mustlink_theorem",
    "z_step",
]
