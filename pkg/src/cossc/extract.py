"""Cluster extraction: connected components of the surviving graph."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ContractViolationError
from .graph import SimilarityGraph, connected_components
from .linalg import laplacian, numerical_rank
from .model import EdgeIndicator


@dataclass(frozen=True)
class ClusterAssignment:
    """Integer label per point plus the surviving-edge mask that produced it.

    Labels are 0-based in BFS discovery order from vertex 0 upward.
    """

    labels: np.ndarray
    num_clusters: int
    surviving_edges: np.ndarray


def extract_clusters(G: SimilarityGraph, Z: EdgeIndicator) -> ClusterAssignment:
    """Label points by the components of the graph restricted to kept edges."""
    if Z.values.shape[0] != G.num_edges:
        raise ContractViolationError("edge indicator length mismatch")
    if not Z.is_binary:
        raise ContractViolationError("edge indicator must be binary")
    keep = Z.values > 0.5
    labels, count = connected_components(G.n, G.rows[keep], G.cols[keep])
    return ClusterAssignment(labels=labels, num_clusters=count, surviving_edges=keep)


def cross_check_rank(G: SimilarityGraph, Z: EdgeIndicator,
                     assignment: ClusterAssignment, rank_tol=None) -> bool:
    """Check the cluster count against the masked Laplacian's rank deficiency."""
    L = laplacian(G.adjacency(z=Z.values, weights="a"))
    return assignment.num_clusters == G.n - numerical_rank(L, rank_tol)
