"""Clustering quality scores: matched accuracy, normalized mutual information,
and the must-link violation ratio."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .exceptions import ContractViolationError
from .graph import MustLinkSet, SimilarityGraph, edge_indices_of_pairs
from .model import EdgeIndicator


@dataclass
class EvalReport:
    """Flat evaluation record; unavailable scores are ``None``."""

    acc: float | None
    nmi: float | None
    rmv: float | None
    num_clusters: int
    iterations: int
    f_final: float | None
    time_ms: float

    def to_dict(self) -> dict:
        return asdict(self)


def _as_label_arrays(pred, truth):
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.shape[0] != truth.shape[0]:
        raise ContractViolationError(
            f"label arrays differ in length ({pred.shape[0]} vs {truth.shape[0]})"
        )
    if pred.shape[0] == 0:
        raise ContractViolationError("label arrays must be nonempty")
    return pred, truth


def contingency(pred, truth) -> np.ndarray:
    """Count matrix with one row per predicted label, one column per true label."""
    pred, truth = _as_label_arrays(pred, truth)
    _, p_inv = np.unique(pred, return_inverse=True)
    _, t_inv = np.unique(truth, return_inverse=True)
    counts = np.zeros((p_inv.max() + 1, t_inv.max() + 1), dtype=np.int64)
    np.add.at(counts, (p_inv, t_inv), 1)
    return counts


def accuracy(pred, truth) -> float:
    """Fraction correct under the best injective matching of label sets.

    Solved exactly as a rectangular assignment problem on the contingency
    counts; predicted clusters left unmatched contribute zero.
    """
    counts = contingency(pred, truth)
    rows, cols = linear_sum_assignment(counts, maximize=True)
    return float(counts[rows, cols].sum() / counts.sum())


def nmi(pred, truth) -> float:
    """Mutual information normalized by ``sqrt(H(pred) * H(truth))``.

    Natural-log entropies. If both partitions have zero entropy they are the
    identical single cluster and the score is 1; if exactly one has zero
    entropy the score is 0.
    """
    counts = contingency(pred, truth).astype(float)
    n = counts.sum()
    p_joint = counts / n
    p_rows = p_joint.sum(axis=1)
    p_cols = p_joint.sum(axis=0)
    h_rows = float(-np.sum(p_rows[p_rows > 0] * np.log(p_rows[p_rows > 0])))
    h_cols = float(-np.sum(p_cols[p_cols > 0] * np.log(p_cols[p_cols > 0])))
    if h_rows == 0.0 and h_cols == 0.0:
        return 1.0
    if h_rows == 0.0 or h_cols == 0.0:
        return 0.0
    mask = p_joint > 0
    outer = np.outer(p_rows, p_cols)
    info = float(np.sum(p_joint[mask] * np.log(p_joint[mask] / outer[mask])))
    return float(min(1.0, max(0.0, info / np.sqrt(h_rows * h_cols))))


def rmv(G: SimilarityGraph, Z: EdgeIndicator, J: MustLinkSet) -> float:
    """Fraction of must-link pairs whose edge was removed (0 for an empty set)."""
    if len(J) == 0:
        return 0.0
    if not Z.is_binary:
        raise ContractViolationError("edge indicator must be binary")
    idx = edge_indices_of_pairs(G, J.pairs)
    return float(np.mean(Z.values[idx] == 0.0))
