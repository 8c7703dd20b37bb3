"""Reference spectral baseline: similarity overrides plus k-means read-out.

The baseline replaces must-link weights by 1, embeds points into the k
smallest eigenvectors of the unnormalized Laplacian, and clusters the rows
with Lloyd's k-means. Unlike the descent solver it needs the exact cluster
count as input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ContractViolationError
from .extract import ClusterAssignment
from .graph import MustLinkSet, SimilarityGraph, edge_indices_of_pairs, validate_mustlinks
from .linalg import laplacian, smallest_eigpairs


@dataclass
class KMeansResult:
    """Best-of-restarts Lloyd solution.

    ``restarts_used`` is the 1-based index of the winning restart;
    ``inertia_history`` its per-iteration inertia (nonincreasing).
    """

    labels: np.ndarray
    centroids: np.ndarray
    inertia: float
    restarts_used: int
    inertia_history: list


def sca_similarity(G: SimilarityGraph, J: MustLinkSet) -> SimilarityGraph:
    """Similarity override: weight 1 on every must-link pair, original elsewhere.

    Pairs outside the support become new unit-weight edges, since the
    override defines their value regardless.
    """
    missing = validate_mustlinks(G, J)
    if missing:
        miss = np.asarray(missing, dtype=np.int64)
        pairs = np.concatenate([np.stack([G.rows, G.cols], axis=1), miss])
        ones = np.ones(len(missing))
        G = SimilarityGraph.from_edges(
            G.n, pairs,
            weights=np.concatenate([G.a, ones]),
            abar=np.concatenate([G.abar, ones]),
            mustlink=np.concatenate([G.mustlink, np.zeros(len(missing), dtype=bool)]),
        )
    a = G.a.copy()
    mustlink = G.mustlink.copy()
    if len(J):
        idx = edge_indices_of_pairs(G, J.pairs)
        a[idx] = 1.0
        mustlink[idx] = True
    return SimilarityGraph(
        n=G.n, rows=G.rows.copy(), cols=G.cols.copy(), a=a, abar=a.copy(), mustlink=mustlink
    )


def _kmeanspp_init(X, k, rng):
    n = X.shape[0]
    centroids = np.empty((k, X.shape[1]))
    centroids[0] = X[int(rng.integers(n))]
    d2 = np.sum((X - centroids[0]) ** 2, axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0:
            pick = int(rng.integers(n))
        else:
            pick = int(rng.choice(n, p=d2 / total))
        centroids[c] = X[pick]
        d2 = np.minimum(d2, np.sum((X - centroids[c]) ** 2, axis=1))
    return centroids


def _assign(X, centroids):
    d2 = np.sum((X[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
    labels = np.argmin(d2, axis=1)
    inertia = float(d2[np.arange(X.shape[0]), labels].sum())
    return labels, d2, inertia


def kmeans_lloyd(X, k, seed, n_restarts=10, max_iter=300, tol=1e-9) -> KMeansResult:
    """Lloyd's k-means with k-means++ seeding and deterministic restarts.

    The lowest-inertia restart wins, ties going to the earliest restart.
    A cluster left empty after assignment is re-seeded at the point farthest
    from its assigned centroid.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ContractViolationError(f"need 1 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(seed)
    best = None
    for restart in range(n_restarts):
        centroids = _kmeanspp_init(X, k, rng)
        history = []
        labels = np.zeros(n, dtype=np.int64)
        for _ in range(max_iter):
            labels, d2, _ = _assign(X, centroids)
            point_cost = d2[np.arange(n), labels]
            for empty in np.nonzero(np.bincount(labels, minlength=k) == 0)[0]:
                far = int(np.argmax(point_cost))
                labels[far] = empty
                point_cost[far] = -np.inf  # exclude from later re-seed picks
            history.append(float(np.maximum(point_cost, 0.0).sum()))
            new_centroids = np.empty_like(centroids)
            for c in range(k):
                new_centroids[c] = X[labels == c].mean(axis=0)
            move = float(np.max(np.linalg.norm(new_centroids - centroids, axis=1)))
            centroids = new_centroids
            if move <= tol:
                break
        diff = X - centroids[labels]
        inertia = float(np.sum(diff * diff))
        history.append(inertia)
        if best is None or inertia < best.inertia:
            best = KMeansResult(
                labels=labels, centroids=centroids, inertia=inertia,
                restarts_used=restart + 1, inertia_history=history,
            )
    return best


def _relabel_first_occurrence(labels):
    mapping = {}
    out = np.empty(labels.shape[0], dtype=np.int64)
    for pos, lab in enumerate(labels):
        if lab not in mapping:
            mapping[lab] = len(mapping)
        out[pos] = mapping[lab]
    return out


def spectral_cluster(G: SimilarityGraph, k: int, seed: int,
                     n_restarts: int = 10) -> ClusterAssignment:
    """Embed into the k smallest Laplacian eigenvectors, then k-means the rows.

    Deterministic given the seed. No edges are removed, so the surviving-edge
    mask is all-true.
    """
    if not 1 <= k < G.n:
        raise ContractViolationError(f"need 1 <= k < n, got k={k}, n={G.n}")
    L = laplacian(G.adjacency(weights="a"))
    spectrum = smallest_eigpairs(L, k, seed=seed)
    km = kmeans_lloyd(spectrum.eigenvectors, k, seed=seed, n_restarts=n_restarts)
    labels = _relabel_first_occurrence(km.labels)
    return ClusterAssignment(
        labels=labels,
        num_clusters=int(np.unique(labels).size),
        surviving_edges=np.ones(G.num_edges, dtype=bool),
    )
