"""Numerically robust subspace arithmetic for complex matrices.

All routines are SVD-based and total on finite input: degenerate results
(empty null spaces, trivial intersections) come back as 0-column or 0-row
matrices, never as errors.  Feasibility questions are decided by the callers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "TolerancePolicy",
    "DEFAULT_TOL",
    "numerical_rank",
    "null_space_basis",
    "left_null_space_basis",
    "column_space_basis",
    "column_space_intersection",
    "row_space_intersection",
    "pseudo_inverse",
]


@dataclass(frozen=True)
class TolerancePolicy:
    """Thresholds separating signal from round-off.

    Attributes
    ----------
    relative_rank_eps : float
        A singular value counts toward the rank when it exceeds
        ``relative_rank_eps * sigma_max * max(rows, cols)``.
    residual_eps : float
        Acceptable relative Frobenius residual for constructed bases and
        alignment identities.
    """

    relative_rank_eps: float = 1e-10
    residual_eps: float = 1e-9

    def __post_init__(self) -> None:
        if not 0.0 < self.relative_rank_eps < 1.0:
            raise ValueError("relative_rank_eps must lie in (0, 1)")
        if not 0.0 < self.residual_eps < 1.0:
            raise ValueError("residual_eps must lie in (0, 1)")


DEFAULT_TOL = TolerancePolicy()


def _as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def _rank_from_singular_values(s: np.ndarray, shape, tol: TolerancePolicy) -> int:
    if s.size == 0:
        return 0
    cutoff = tol.relative_rank_eps * s[0] * max(shape)
    return int(np.count_nonzero(s > cutoff))


def numerical_rank(a, tol: TolerancePolicy = DEFAULT_TOL) -> int:
    """Number of singular values above ``eps * sigma_max * max(rows, cols)``."""
    a = _as_matrix(a)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    return _rank_from_singular_values(s, a.shape, tol)


def null_space_basis(a, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of ``{x : A x = 0}``.

    Returns an ``(n, n - rank)`` matrix; ``(n, 0)`` when the null space is
    trivial.  A matrix with zero rows is treated as the zero map, so the
    whole domain comes back.
    """
    a = _as_matrix(a)
    n = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    rank = _rank_from_singular_values(s, a.shape, tol)
    return vh[rank:].conj().T


def left_null_space_basis(a, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (rows) of ``{y : y A = 0}``.

    Returns an ``(m - rank, m)`` matrix; ``(0, m)`` when trivial.
    """
    a = _as_matrix(a)
    m = a.shape[0]
    if a.shape[1] == 0:
        return np.eye(m, dtype=complex)
    u, s, _ = np.linalg.svd(a, full_matrices=True)
    rank = _rank_from_singular_values(s, a.shape, tol)
    return u[:, rank:].conj().T


def column_space_basis(a, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the column space of A."""
    a = _as_matrix(a)
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    rank = _rank_from_singular_values(s, a.shape, tol)
    return u[:, :rank]


def column_space_intersection(a, b, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of ``span(A) ∩ span(B)``.

    Constructive: a null vector ``(x_a; x_b)`` of the horizontally stacked
    ``[A | -B]`` satisfies ``A x_a = B x_b``, which is precisely a vector in
    the intersection.  The images ``A x_a`` of a null-space basis span the
    intersection; they are orthonormalized before being returned.  The
    column count equals ``rank(A) + rank(B) - rank([A B])``.
    """
    a = _as_matrix(a)
    b = _as_matrix(b)
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"row counts differ: {a.shape[0]} vs {b.shape[0]}")
    coeffs = null_space_basis(np.hstack([a, -b]), tol)
    if coeffs.shape[1] == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    g = a @ coeffs[: a.shape[1], :]
    return column_space_basis(g, tol)


def row_space_intersection(a, b, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal rows spanning ``rowspace(A) ∩ rowspace(B)``.

    Plain (unconjugated) transposition maps row spaces onto column spaces,
    so this is the column-space intersection of the transposes.
    """
    a = _as_matrix(a)
    b = _as_matrix(b)
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"column counts differ: {a.shape[1]} vs {b.shape[1]}")
    return column_space_intersection(a.T, b.T, tol).T


def pseudo_inverse(a, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse with the policy's rank cutoff."""
    a = _as_matrix(a)
    return np.linalg.pinv(a, rcond=tol.relative_rank_eps * max(a.shape))
