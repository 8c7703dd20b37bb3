"""Similarity graph construction, must-link scaling, and connected components.

The similarity graph is stored as a canonical edge list (``i < j``,
lexicographically sorted) carrying both the base weight ``a`` and the
must-link-scaled weight ``abar`` per edge, so the two weightings always share
one support structure.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.spatial.distance import pdist, squareform

from .exceptions import ContractViolationError, MustLinkInfeasibleError

#: Lower bound on the local scale, guarding coincident points.
SIGMA_FLOOR = 1e-12


def auto_neighbor_count(n: int) -> int:
    """Default neighborhood size ``ceil(ln n)``, floored at 1."""
    return max(1, math.ceil(math.log(n)))


@dataclass(frozen=True)
class MustLinkSet:
    """Unordered vertex pairs required to land in one output cluster."""

    pairs: np.ndarray  # (k, 2) int64, i < j, lexicographically sorted, unique

    def __post_init__(self):
        pairs = np.asarray(self.pairs, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "pairs", pairs)
        pairs.setflags(write=False)

    @classmethod
    def from_pairs(cls, pairs) -> "MustLinkSet":
        arr = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
        if arr.size and np.any(arr[:, 0] == arr[:, 1]):
            raise ContractViolationError("must-link pairs may not be self-pairs")
        canonical = np.sort(arr, axis=1)
        return cls(np.unique(canonical, axis=0))

    @classmethod
    def empty(cls) -> "MustLinkSet":
        return cls(np.empty((0, 2), dtype=np.int64))

    def __len__(self) -> int:
        return int(self.pairs.shape[0])

    def __iter__(self):
        for i, j in self.pairs:
            yield (int(i), int(j))


@dataclass(frozen=True)
class SimilarityGraph:
    """Sparse symmetric nonnegative weighted graph.

    ``rows[e] < cols[e]`` index the endpoints of edge ``e``; ``a[e] > 0`` is
    its base weight and ``abar[e] >= a[e]`` the must-link-scaled weight.
    Edges are lexicographically sorted and unique, and the arrays are marked
    read-only, so instances can be shared freely across threads.
    """

    n: int
    rows: np.ndarray
    cols: np.ndarray
    a: np.ndarray
    abar: np.ndarray
    mustlink: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64)
        cols = np.asarray(self.cols, dtype=np.int64)
        a = np.asarray(self.a, dtype=float)
        abar = np.asarray(self.abar, dtype=float)
        mustlink = np.asarray(self.mustlink, dtype=bool)
        if self.n < 1:
            raise ContractViolationError("graph needs at least one vertex")
        m = rows.shape[0]
        if not (cols.shape[0] == a.shape[0] == abar.shape[0] == mustlink.shape[0] == m):
            raise ContractViolationError("edge arrays must have equal length")
        if m:
            if rows.min() < 0 or cols.max() >= self.n:
                raise ContractViolationError("edge endpoint out of range")
            if np.any(rows >= cols):
                raise ContractViolationError("edges must satisfy i < j")
            keys = rows * self.n + cols
            if np.any(np.diff(keys) <= 0):
                raise ContractViolationError("edges must be sorted and unique")
            if not np.all(np.isfinite(a)) or np.any(a <= 0):
                raise ContractViolationError("edge weights must be finite and positive")
            if not np.all(np.isfinite(abar)) or np.any(abar < a):
                raise ContractViolationError("scaled weights must be finite and >= base weights")
        for name, arr in (("rows", rows), ("cols", cols), ("a", a), ("abar", abar), ("mustlink", mustlink)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_edges(cls, n, pairs, weights, abar=None, mustlink=None) -> "SimilarityGraph":
        """Build a graph from unordered pairs, canonicalizing edge order."""
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        weights = np.asarray(weights, dtype=float)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            raise ContractViolationError("self-loops are not allowed")
        lo = np.minimum(pairs[:, 0], pairs[:, 1])
        hi = np.maximum(pairs[:, 0], pairs[:, 1])
        order = np.lexsort((hi, lo))
        lo, hi = lo[order], hi[order]
        if lo.size and np.any((np.diff(lo) == 0) & (np.diff(hi) == 0)):
            raise ContractViolationError("duplicate edges are not allowed")
        abar = weights if abar is None else np.asarray(abar, dtype=float)
        mustlink = (
            np.zeros(lo.size, dtype=bool) if mustlink is None else np.asarray(mustlink, dtype=bool)
        )
        return cls(
            n=n,
            rows=lo,
            cols=hi,
            a=weights[order],
            abar=abar[order].copy(),
            mustlink=mustlink[order],
        )

    @property
    def num_edges(self) -> int:
        return int(self.rows.shape[0])

    @cached_property
    def edge_index(self) -> dict:
        """Map from a canonical pair ``(i, j)`` with ``i < j`` to its edge position."""
        return {(int(i), int(j)): e for e, (i, j) in enumerate(zip(self.rows, self.cols))}

    def adjacency(self, z=None, weights="a", sparse=False):
        """Symmetric adjacency matrix, optionally masked by per-edge values ``z``.

        ``weights`` selects the base (``"a"``) or scaled (``"abar"``) weighting.
        """
        if weights not in ("a", "abar"):
            raise ContractViolationError(f"unknown weighting {weights!r}")
        w = self.a if weights == "a" else self.abar
        if z is not None:
            z = np.asarray(z, dtype=float)
            if z.shape != w.shape:
                raise ContractViolationError("edge mask length mismatch")
            w = w * z
        if sparse:
            coo = sp.coo_matrix(
                (np.concatenate([w, w]), (np.concatenate([self.rows, self.cols]),
                                          np.concatenate([self.cols, self.rows]))),
                shape=(self.n, self.n),
            )
            return coo.tocsr()
        W = np.zeros((self.n, self.n))
        W[self.rows, self.cols] = w
        W[self.cols, self.rows] = w
        return W


def build_knn_similarity(points, k_n=None, sigma_index=7) -> SimilarityGraph:
    """Mutual k-nearest-neighbor similarity graph with local scaling.

    An edge ``(i, j)`` exists iff each point is among the other's ``k_n``
    nearest neighbors (inclusive of distance ties). Raw weights are
    ``exp(-||x_i - x_j||^2 / (sigma_i sigma_j))`` with ``sigma_i`` the
    distance to the ``sigma_index``-th neighbor (clamped to ``n - 1``,
    floored at ``SIGMA_FLOOR``), then degree-normalized and symmetrized by
    :func:`row_normalize_symmetrize`.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ContractViolationError("points must be a 2-D array")
    n = pts.shape[0]
    if n < 2:
        raise ContractViolationError("need at least 2 points")
    if not np.all(np.isfinite(pts)):
        raise ContractViolationError("points must be finite")
    if k_n is None:
        k_n = auto_neighbor_count(n)
    if not 1 <= k_n <= n - 1:
        raise ContractViolationError(f"k_n must be in [1, n-1], got {k_n}")
    if sigma_index < 1:
        raise ContractViolationError("sigma_index must be >= 1")

    dist = squareform(pdist(pts))
    off = dist.copy()
    np.fill_diagonal(off, np.inf)
    ordered = np.sort(off, axis=1)
    kth = ordered[:, k_n - 1]
    near = off <= kth[:, None]
    mutual = near & near.T

    s_idx = min(sigma_index, n - 1)
    sigma = np.maximum(ordered[:, s_idx - 1], SIGMA_FLOOR)

    iu, ju = np.nonzero(np.triu(mutual, k=1))
    w = np.exp(-(dist[iu, ju] ** 2) / (sigma[iu] * sigma[ju]))
    keep = w > 0  # drop edges whose weight underflowed to zero
    iu, ju, w = iu[keep], ju[keep], w[keep]
    raw = SimilarityGraph(
        n=n, rows=iu, cols=ju, a=w, abar=w.copy(), mustlink=np.zeros(w.size, dtype=bool)
    )
    return row_normalize_symmetrize(raw)


def row_normalize_symmetrize(G: SimilarityGraph) -> SimilarityGraph:
    """Degree-normalize raw weights and average with the transpose.

    Treating ``G.a`` as raw weights ``W``, returns the graph of
    ``(D^-1 W + (D^-1 W)^T) / 2`` with ``D = Diag(W e)``. Vertices of zero
    degree pass their weights through unnormalized. Resets ``abar`` to the
    normalized weights and clears must-link flags.
    """
    deg = np.zeros(G.n)
    np.add.at(deg, G.rows, G.a)
    np.add.at(deg, G.cols, G.a)
    safe = np.where(deg > 0, deg, 1.0)
    a = 0.5 * (G.a / safe[G.rows] + G.a / safe[G.cols])
    return SimilarityGraph(
        n=G.n, rows=G.rows.copy(), cols=G.cols.copy(), a=a, abar=a.copy(),
        mustlink=np.zeros(a.size, dtype=bool),
    )


def validate_mustlinks(G: SimilarityGraph, J: MustLinkSet) -> list:
    """Pairs of ``J`` that are not edges of ``G`` (empty list means valid)."""
    index = G.edge_index
    return [(i, j) for i, j in J if (i, j) not in index]


def edge_indices_of_pairs(G: SimilarityGraph, pairs) -> np.ndarray:
    """Edge positions of canonical pairs; raises if any pair is not an edge."""
    index = G.edge_index
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    missing = [(int(i), int(j)) for i, j in pairs if (int(i), int(j)) not in index]
    if missing:
        raise MustLinkInfeasibleError(missing)
    return np.array([index[(int(i), int(j))] for i, j in pairs], dtype=np.int64)


def scale_must_links(G: SimilarityGraph, J: MustLinkSet, p: float,
                     inject_missing: bool = False) -> SimilarityGraph:
    """Multiply the scaled weight of every must-link edge by ``p >= 1``.

    Base weights are untouched. Pairs of ``J`` outside the support abort
    with :class:`MustLinkInfeasibleError` unless ``inject_missing`` is set,
    in which case each missing pair becomes a new edge whose weight is the
    mean of the existing weights. Scaling composes multiplicatively, so a
    second application with ``p = 1`` leaves ``abar`` unchanged.
    """
    if p < 1:
        raise ContractViolationError(f"p must be >= 1, got {p}")
    missing = validate_mustlinks(G, J)
    if missing:
        if not inject_missing:
            raise MustLinkInfeasibleError(missing)
        inject_w = float(G.a.mean()) if G.num_edges else 1.0
        miss = np.asarray(missing, dtype=np.int64)
        pairs = np.concatenate([np.stack([G.rows, G.cols], axis=1), miss])
        fill = np.full(len(missing), inject_w)
        G = SimilarityGraph.from_edges(
            G.n, pairs,
            weights=np.concatenate([G.a, fill]),
            abar=np.concatenate([G.abar, fill]),
            mustlink=np.concatenate([G.mustlink, np.zeros(len(missing), dtype=bool)]),
        )
    if len(J):
        idx = edge_indices_of_pairs(G, J.pairs)
    else:
        idx = np.empty(0, dtype=np.int64)
    abar = G.abar.copy()
    abar[idx] *= p
    mustlink = G.mustlink.copy()
    mustlink[idx] = True
    return SimilarityGraph(
        n=G.n, rows=G.rows.copy(), cols=G.cols.copy(), a=G.a.copy(), abar=abar,
        mustlink=mustlink,
    )


def connected_components(n, rows, cols):
    """BFS connected components over an edge list.

    Labels are 0-based in order of first discovery, seeding from vertex 0
    upward, which makes them deterministic. Returns ``(labels, count)``.
    """
    adj = [[] for _ in range(n)]
    for i, j in zip(np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64)):
        adj[i].append(int(j))
        adj[j].append(int(i))
    labels = np.full(n, -1, dtype=np.int64)
    next_label = 0
    for start in range(n):
        if labels[start] >= 0:
            continue
        labels[start] = next_label
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if labels[v] < 0:
                    labels[v] = next_label
                    queue.append(v)
        next_label += 1
    return labels, next_label
