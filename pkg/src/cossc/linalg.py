"""Symmetric linear algebra kernels: graph Laplacians, smallest eigenpairs, numerical rank.

Dense operands are plain numpy arrays, sparse ones are ``scipy.sparse``
matrices; every function accepts either. All functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .exceptions import ContractViolationError, EigensolverError

#: Below this dimension eigenproblems are solved by a full dense
#: decomposition; above it an iterative shift-invert Lanczos solver is used.
DENSE_CUTOFF = 2000

#: Shift used to regularize the shift-invert factorization of PSD matrices.
EIGSH_SHIFT = -1e-8


@dataclass(frozen=True)
class SpectrumResult:
    """Smallest eigenpairs of a symmetric PSD matrix.

    ``eigenvalues`` are ascending. ``eigenvectors`` is column-orthonormal and
    each column is flipped so its largest-magnitude entry is nonnegative.
    ``residual_norm`` is ``max_k ||M v_k - lambda_k v_k||_2``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual_norm: float


def _check_square(M, name="matrix"):
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ContractViolationError(f"{name} must be square, got shape {M.shape}")


def matrix_l1_norm(M) -> float:
    """Maximum absolute column sum."""
    if sp.issparse(M):
        return float(abs(M).sum(axis=0).max()) if M.nnz else 0.0
    M = np.asarray(M)
    return float(np.abs(M).sum(axis=0).max()) if M.size else 0.0


def laplacian(W):
    """Graph Laplacian ``Diag(W e) - W`` of a symmetric nonnegative matrix.

    ``W`` must be symmetric with nonnegative entries and zero diagonal. The
    result is positive semidefinite and annihilates the all-ones vector.
    Returns the same storage kind (dense or sparse CSR) as the input.
    """
    _check_square(W, "W")
    if sp.issparse(W):
        W = W.tocsr()
        if W.nnz:
            if not np.all(np.isfinite(W.data)):
                raise ContractViolationError("W has non-finite entries")
            if W.data.min() < 0:
                raise ContractViolationError("W has negative entries")
        if np.any(W.diagonal() != 0):
            raise ContractViolationError("W has a nonzero diagonal")
        asym = W - W.T
        if asym.nnz and np.max(np.abs(asym.data)) != 0:
            raise ContractViolationError("W is not symmetric")
        deg = np.asarray(W.sum(axis=1)).ravel()
        return (sp.diags(deg) - W).tocsr()

    W = np.asarray(W, dtype=float)
    if not np.all(np.isfinite(W)):
        raise ContractViolationError("W has non-finite entries")
    if np.any(W < 0):
        raise ContractViolationError("W has negative entries")
    if np.any(np.diagonal(W) != 0):
        raise ContractViolationError("W has a nonzero diagonal")
    if not np.array_equal(W, W.T):
        raise ContractViolationError("W is not symmetric")
    return np.diag(W.sum(axis=1)) - W


def laplacian_adjoint_entry(N, i, j) -> float:
    """Entry ``(i, j)`` of the adjoint of the Laplacian operator: ``N_ii - N_ij``."""
    _check_square(N, "N")
    n = N.shape[0]
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"indices ({i}, {j}) out of range for n={n}")
    return float(N[i, i] - N[i, j])


def _fix_column_signs(V):
    """Flip each column so its largest-magnitude entry is nonnegative."""
    V = V.copy()
    for k in range(V.shape[1]):
        col = V[:, k]
        idx = int(np.argmax(np.abs(col)))
        if col[idx] < 0:
            V[:, k] = -col
    return V


def smallest_eigpairs(M, d, residual_tol=None, dense_cutoff=DENSE_CUTOFF, seed=0) -> SpectrumResult:
    """The ``d`` algebraically smallest eigenpairs of a symmetric PSD matrix.

    Dense full decomposition for ``n <= dense_cutoff``; otherwise a
    shift-invert Lanczos solve around ``EIGSH_SHIFT`` with a start vector
    drawn deterministically from ``seed``. Raises
    :class:`~cossc.exceptions.EigensolverError` if the residual exceeds
    ``residual_tol`` (default ``1e-8 * max(1, ||M||_1)``).
    """
    _check_square(M, "M")
    n = M.shape[0]
    if not 1 <= d < n:
        raise ContractViolationError(f"need 1 <= d < n, got d={d}, n={n}")
    if residual_tol is None:
        residual_tol = 1e-8 * max(1.0, matrix_l1_norm(M))

    if n <= dense_cutoff:
        dense = M.toarray() if sp.issparse(M) else np.asarray(M, dtype=float)
        vals, vecs = scipy.linalg.eigh(dense, subset_by_index=(0, d - 1))
    else:
        Ms = M.tocsc() if sp.issparse(M) else sp.csc_matrix(M)
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(n)
        try:
            vals, vecs = spla.eigsh(Ms, k=d, sigma=EIGSH_SHIFT, which="LM", v0=v0)
        except spla.ArpackNoConvergence as exc:
            raise EigensolverError(
                f"iterative eigensolver failed to converge for n={n}, d={d}"
            ) from exc

    order = np.argsort(vals, kind="stable")
    vals = np.asarray(vals, dtype=float)[order]
    vecs = _fix_column_signs(np.asarray(vecs, dtype=float)[:, order])

    residual_mat = (M @ vecs) - vecs * vals
    residual = float(np.max(np.linalg.norm(np.asarray(residual_mat), axis=0))) if d else 0.0
    if residual > residual_tol:
        raise EigensolverError(
            f"eigenpair residual {residual:.3e} exceeds tolerance {residual_tol:.3e}",
            residual=residual,
        )
    return SpectrumResult(vals, vecs, residual)


def numerical_rank(M, tau=None) -> int:
    """Number of eigenvalues of a PSD matrix strictly above ``tau``.

    Default ``tau`` is ``1e-8 * max(1, max diagonal entry)``. Uses a full
    dense decomposition; intended for desk-scale matrices.
    """
    _check_square(M, "M")
    dense = M.toarray() if sp.issparse(M) else np.asarray(M, dtype=float)
    if tau is None:
        max_diag = float(np.max(np.diagonal(dense))) if dense.size else 0.0
        tau = 1e-8 * max(1.0, max_diag)
    if tau <= 0:
        raise ContractViolationError("tau must be positive")
    vals = np.linalg.eigvalsh(dense)
    return int(np.count_nonzero(vals > tau))
