"""The relaxed partitioning objective, its per-edge gradient, and the two block updates.

For an embedding ``H`` (n x d, column-orthonormal) and per-edge values ``z``
over the support of the similarity graph, the objective is

    f(z, H) = sum_e z_e * a_e * ||H_i - H_j||^2  -  2 * beta * sum_e z_e * abar_e,

which is linear in ``z`` with per-edge coefficient

    g_e = a_e * (q_ii + q_jj - 2 q_ij) - 2 * beta * abar_e,   q = H H^T.

The edge update sends ``z_e`` to 0/1 against the sign of ``g_e`` (keeping the
previous value inside a dead zone around zero), and the embedding update takes
the ``d`` smallest eigenvectors of the Laplacian of the surviving graph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ContractViolationError
from .graph import SimilarityGraph
from .linalg import laplacian, matrix_l1_norm, smallest_eigpairs

#: Allowed deviation of H^T H from the identity.
ORTHO_TOL = 1e-8

#: Scale-relative floor for eigensolver residuals, so that eps = 0 requests
#: remain solvable at float precision.
RESIDUAL_FLOOR = 1e-11


@dataclass
class EdgeIndicator:
    """Per-edge keep(1)/remove(0) values aligned with a graph's edge list.

    Values live in [0, 1]; descent iterates are always binary, fractional
    values appear only in relaxation diagnostics.
    """

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise ContractViolationError("edge indicator must be 1-D")
        if values.size and (not np.all(np.isfinite(values)) or values.min() < 0 or values.max() > 1):
            raise ContractViolationError("edge indicator values must lie in [0, 1]")
        self.values = values

    @property
    def is_binary(self) -> bool:
        return bool(np.all((self.values == 0.0) | (self.values == 1.0)))

    @classmethod
    def all_ones(cls, num_edges: int) -> "EdgeIndicator":
        return cls(np.ones(num_edges))

    @classmethod
    def zeros(cls, num_edges: int) -> "EdgeIndicator":
        return cls(np.zeros(num_edges))

    @classmethod
    def from_mask(cls, mask) -> "EdgeIndicator":
        return cls(np.asarray(mask, dtype=float))

    def copy(self) -> "EdgeIndicator":
        return EdgeIndicator(self.values.copy())


def check_orthonormal(H, tol=ORTHO_TOL):
    """Validate that ``H`` has orthonormal columns; returns it as float array."""
    H = np.asarray(H, dtype=float)
    if H.ndim != 2:
        raise ContractViolationError("embedding must be a 2-D array")
    gram = H.T @ H
    dev = float(np.max(np.abs(gram - np.eye(H.shape[1]))))
    if dev > tol:
        raise ContractViolationError(f"embedding is not orthonormal (deviation {dev:.2e})")
    return H


def edge_stretch(G: SimilarityGraph, H) -> np.ndarray:
    """Squared row differences ``||H_i - H_j||^2`` per edge."""
    H = np.asarray(H, dtype=float)
    diff = H[G.rows] - H[G.cols]
    return np.einsum("ef,ef->e", diff, diff)


def default_zero_threshold(beta: float, abar_max: float) -> float:
    """Dead-zone width treating float-noise gradients as exact zeros."""
    return 1e-12 * (1.0 + beta * abar_max)


def _check_dims(G, Z, H):
    H = check_orthonormal(H)
    if H.shape[0] != G.n:
        raise ContractViolationError(
            f"embedding has {H.shape[0]} rows for a graph on {G.n} vertices"
        )
    if Z.values.shape[0] != G.num_edges:
        raise ContractViolationError("edge indicator length mismatch")
    return H


def objective(G: SimilarityGraph, Z: EdgeIndicator, H, beta: float) -> float:
    """Objective value ``f(Z, H)``; both trace terms count each edge twice."""
    H = _check_dims(G, Z, H)
    s = edge_stretch(G, H)
    return float(np.dot(Z.values, G.a * s - 2.0 * beta * G.abar))


def grad_z(G: SimilarityGraph, H, beta: float) -> np.ndarray:
    """Per-edge objective coefficients ``g_e``, materialized on the support only."""
    H = check_orthonormal(H)
    if H.shape[0] != G.n:
        raise ContractViolationError(
            f"embedding has {H.shape[0]} rows for a graph on {G.n} vertices"
        )
    return G.a * edge_stretch(G, H) - 2.0 * beta * G.abar


def z_step(Z: EdgeIndicator, grad_values, zero_threshold: float) -> EdgeIndicator:
    """Exact edge-block minimizer: 0 where the gradient is positive, 1 where
    negative, previous value inside the ``zero_threshold`` dead zone."""
    if not Z.is_binary:
        raise ContractViolationError("edge indicator must be binary")
    g = np.asarray(grad_values, dtype=float)
    if g.shape != Z.values.shape:
        raise ContractViolationError("gradient length mismatch")
    if zero_threshold < 0:
        raise ContractViolationError("zero_threshold must be nonnegative")
    out = Z.values.copy()
    out[g > zero_threshold] = 0.0
    out[g < -zero_threshold] = 1.0
    return EdgeIndicator(out)


def h_step(G: SimilarityGraph, Z: EdgeIndicator, d: int, eps: float,
           dense_cutoff: int = 2000, seed: int = 0):
    """Embedding-block update: ``d`` smallest eigenvectors of the masked Laplacian.

    The achieved trace satisfies
    ``tr(H^T L H) - sum_{i<=d} lambda_i(L) <= eps``, enforced through the
    sufficient residual bound ``eps / (2 d max(1, ||L||_1))`` (floored at
    ``RESIDUAL_FLOOR`` times the matrix scale). Returns ``(H, achieved_trace)``.
    """
    if not Z.is_binary:
        raise ContractViolationError("edge indicator must be binary")
    if eps < 0:
        raise ContractViolationError("eps must be nonnegative")
    L = laplacian(G.adjacency(z=Z.values, weights="a", sparse=G.n > dense_cutoff))
    scale = max(1.0, matrix_l1_norm(L))
    residual_tol = max(eps / (2.0 * d * scale), RESIDUAL_FLOOR * scale)
    spectrum = smallest_eigpairs(L, d, residual_tol=residual_tol,
                                 dense_cutoff=dense_cutoff, seed=seed)
    achieved = float(np.dot(G.a * Z.values, edge_stretch(G, spectrum.eigenvectors)))
    return spectrum.eigenvectors, achieved
