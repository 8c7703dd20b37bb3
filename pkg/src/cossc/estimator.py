"""Scikit-learn style estimators wrapping the graph-partitioning pipeline."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils import check_array

from .baseline import sca_similarity, spectral_cluster
from .extract import extract_clusters
from .graph import MustLinkSet, SimilarityGraph, build_knn_similarity, scale_must_links
from .solver import SolverConfig, cossc_solve


def _as_mustlinks(must_links) -> MustLinkSet:
    if must_links is None:
        return MustLinkSet.empty()
    if isinstance(must_links, MustLinkSet):
        return must_links
    return MustLinkSet.from_pairs(must_links)


def _as_graph(X, k_n, sigma_index) -> SimilarityGraph:
    if isinstance(X, SimilarityGraph):
        return X
    X = check_array(X, dtype=np.float64)
    return _build(X, k_n, sigma_index)


def _build(X, k_n, sigma_index):
    resolved = None if k_n in (None, "auto") else int(k_n)
    return build_knn_similarity(X, k_n=resolved, sigma_index=sigma_index)


class COSSC(ClusterMixin, BaseEstimator):
    """Semi-supervised clustering by sparse graph partitioning.

    Builds a mutual k-nearest-neighbor similarity graph with local scaling,
    multiplies must-link edge weights by ``p``, runs block coordinate descent
    on the relaxed partitioning model, and labels points by the connected
    components of the surviving graph. The number of output clusters is
    data-driven: ``d`` only has to overestimate it.

    Parameters
    ----------
    d : int, default=8
        Upper bound on the number of output clusters (strictly below the
        number of points).
    beta : float or "auto", default="auto"
        Trade-off between cutting cheaply and cutting at all; ``"auto"``
        resolves to ``(d - 1) / n``.
    p : float, default=10.0
        Must-link weight multiplier, ``p >= 1``.
    eps : float, default=1e-3
        Termination precision of the descent loop.
    max_iter : int, default=500
        Iteration cap of the descent loop.
    k_n : int or "auto", default="auto"
        Neighborhood size of the mutual-kNN graph; ``"auto"`` is
        ``ceil(ln n)``.
    sigma_index : int, default=7
        Neighbor rank used for the local similarity scale.
    inject_missing : bool, default=False
        Whether must-link pairs outside the graph support become synthetic
        edges instead of aborting.
    dense_cutoff : int, default=2000
        Matrix size above which eigenproblems switch to an iterative solver.
    random_state : int, default=0
        Seed for every randomized component.

    Attributes
    ----------
    labels_ : ndarray of shape (n,)
        Cluster label per point.
    n_clusters_ : int
        Number of output clusters.
    graph_ : SimilarityGraph
        The scaled similarity graph that was partitioned.
    indicator_ : EdgeIndicator
        Binary per-edge keep/remove decisions.
    embedding_ : ndarray of shape (n, d)
        Final column-orthonormal embedding.
    trace_ : SolverTrace
        Per-iteration solver history.

    Examples
    --------
    >>> from cossc import COSSC
    >>> from cossc.data import SyntheticSpec, Shape, generate
    >>> X, y = generate(SyntheticSpec(Shape.TWO_MOONS, n_per_cluster=100, seed=3))
    >>> model = COSSC(d=4).fit(X)
    >>> model.n_clusters_
    2
    """

    def __init__(self, d=8, beta="auto", p=10.0, eps=1e-3, max_iter=500,
                 k_n="auto", sigma_index=7, inject_missing=False,
                 dense_cutoff=2000, random_state=0):
        self.d = d
        self.beta = beta
        self.p = p
        self.eps = eps
        self.max_iter = max_iter
        self.k_n = k_n
        self.sigma_index = sigma_index
        self.inject_missing = inject_missing
        self.dense_cutoff = dense_cutoff
        self.random_state = random_state

    def fit(self, X, y=None, must_links=None):
        """Cluster points (n x m array) or a prebuilt :class:`SimilarityGraph`.

        ``must_links`` is an iterable of index pairs or a
        :class:`MustLinkSet`; ``y`` is ignored and present for API
        compatibility.
        """
        graph = _as_graph(X, self.k_n, self.sigma_index)
        mustlinks = _as_mustlinks(must_links)
        graph = scale_must_links(graph, mustlinks, self.p,
                                 inject_missing=self.inject_missing)
        config = SolverConfig(
            d=self.d,
            beta=None if self.beta == "auto" else float(self.beta),
            p=self.p,
            eps=self.eps,
            max_iter=self.max_iter,
            seed=self.random_state,
            dense_cutoff=self.dense_cutoff,
        )
        indicator, embedding, trace = cossc_solve(graph, config)
        assignment = extract_clusters(graph, indicator)

        self.graph_ = graph
        self.mustlinks_ = mustlinks
        self.config_ = config
        self.indicator_ = indicator
        self.embedding_ = embedding
        self.trace_ = trace
        self.assignment_ = assignment
        self.labels_ = assignment.labels
        self.n_clusters_ = assignment.num_clusters
        return self

    def fit_predict(self, X, y=None, must_links=None):
        return self.fit(X, y=y, must_links=must_links).labels_


class SCABaseline(ClusterMixin, BaseEstimator):
    """Spectral clustering baseline with unit-weight must-link overrides.

    Embeds points into the ``k`` smallest eigenvectors of the unnormalized
    Laplacian of the override similarity and reads clusters off with Lloyd's
    k-means (k-means++ seeding, best of ``n_restarts``). Requires the exact
    cluster count ``k``.
    """

    def __init__(self, k=2, k_n="auto", sigma_index=7, n_restarts=10, random_state=0):
        self.k = k
        self.k_n = k_n
        self.sigma_index = sigma_index
        self.n_restarts = n_restarts
        self.random_state = random_state

    def fit(self, X, y=None, must_links=None):
        graph = _as_graph(X, self.k_n, self.sigma_index)
        mustlinks = _as_mustlinks(must_links)
        override = sca_similarity(graph, mustlinks)
        assignment = spectral_cluster(override, self.k, seed=self.random_state,
                                      n_restarts=self.n_restarts)
        self.graph_ = override
        self.mustlinks_ = mustlinks
        self.assignment_ = assignment
        self.labels_ = assignment.labels
        self.n_clusters_ = assignment.num_clusters
        return self

    def fit_predict(self, X, y=None, must_links=None):
        return self.fit(X, y=y, must_links=must_links).labels_
