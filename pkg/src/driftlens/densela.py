"""Small dense linear algebra kernels.

Everything here works on float64 ``numpy`` arrays. The symmetric
eigensolver is a cyclic Jacobi iteration; the symmetric-definite
generalized problem ``A p = eta B p`` is reduced to a standard one by
Cholesky congruence, so no explicit inverse of ``B`` is ever formed.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import (
    DimensionMismatch,
    NoConvergence,
    NotPositiveDefinite,
    NumericalError,
    NotSymmetric,
    SingularDiagonal,
)

try:
    from numba import njit
except ImportError:  # pragma: no cover - pure python fallback, slow at D=128
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


SYMMETRY_RTOL = 1e-10
MAX_SWEEPS = 100


class EigPairs(NamedTuple):
    """Eigenvalues sorted descending and the matching eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def _as_square(M, name="matrix"):
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NumericalError(f"{name} has non-finite entries")
    return M


def symmetrize(M, name="matrix"):
    """Check near-symmetry and return ``(M + M.T) / 2``."""
    M = _as_square(M, name)
    scale = np.linalg.norm(M)
    asym = np.linalg.norm(M - M.T)
    if asym > SYMMETRY_RTOL * scale:
        raise NotSymmetric(
            f"{name} is not symmetric: |M - M^T| = {asym:.3e}, |M| = {scale:.3e}"
        )
    return 0.5 * (M + M.T)


def cholesky(B):
    """Lower-triangular ``L`` with ``L @ L.T == B``.

    Raises
    ------
    NotPositiveDefinite
        If a pivot is not strictly positive.
    """
    B = symmetrize(B, "B")
    n = B.shape[0]
    L = np.zeros_like(B)
    for j in range(n):
        row = L[j, :j]
        pivot = B[j, j] - row @ row
        if not pivot > 0.0:
            raise NotPositiveDefinite(
                f"pivot {j} is {pivot:.3e}; matrix is not positive definite"
            )
        ljj = math.sqrt(pivot)
        L[j, j] = ljj
        if j + 1 < n:
            L[j + 1:, j] = (B[j + 1:, j] - L[j + 1:, :j] @ row) / ljj
    return L


def tri_solve(L, rhs, side="lower"):
    """Solve ``L X = rhs`` (``side='lower'``) or ``L.T X = rhs`` (``side='upper'``).

    ``L`` is lower triangular; its upper part is ignored. ``rhs`` may be a
    vector or a matrix with ``L.shape[0]`` rows.
    """
    L = _as_square(L, "L")
    rhs = np.asarray(rhs, dtype=np.float64)
    vector = rhs.ndim == 1
    R = rhs.reshape(-1, 1) if vector else rhs
    n = L.shape[0]
    if R.shape[0] != n:
        raise DimensionMismatch(f"rhs has {R.shape[0]} rows, L is {n}x{n}")
    diag = np.diag(L)
    bad = np.flatnonzero(np.abs(diag) < 1e-300)
    if bad.size:
        raise SingularDiagonal(f"L[{bad[0]},{bad[0]}] is zero")

    X = np.zeros_like(R)
    if side == "lower":
        for i in range(n):
            X[i] = (R[i] - L[i, :i] @ X[:i]) / diag[i]
    elif side == "upper":
        # L.T is upper triangular: back substitution with column i of L
        for i in range(n - 1, -1, -1):
            X[i] = (R[i] - L[i + 1:, i] @ X[i + 1:]) / diag[i]
    else:
        raise ValueError(f"side must be 'lower' or 'upper', got {side!r}")
    return X[:, 0] if vector else X


@njit(cache=True, nogil=True)
def _jacobi_sweeps(A, tol_abs, max_sweeps):
    n = A.shape[0]
    V = np.eye(n)
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += A[i, j] * A[i, j]
        if math.sqrt(off) <= tol_abs:
            return V, sweep, True
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = c * akp - s * akq
                    A[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = c * apk - s * aqk
                    A[q, k] = s * apk + c * aqk
                A[p, q] = 0.0
                A[q, p] = 0.0
                for k in range(n):
                    vkp = V[k, p]
                    vkq = V[k, q]
                    V[k, p] = c * vkp - s * vkq
                    V[k, q] = s * vkp + c * vkq
    return V, max_sweeps, False


def fix_signs(V, rtol=1e-12):
    """Flip columns so each one's largest-magnitude entry is positive.

    Entries within ``rtol`` of the column maximum count as ties; the lowest
    index among them decides.
    """
    V = np.array(V, dtype=np.float64, copy=True)
    for j in range(V.shape[1]):
        col = np.abs(V[:, j])
        top = col.max()
        if top == 0.0:
            continue
        lead = int(np.flatnonzero(col >= top * (1.0 - rtol))[0])
        if V[lead, j] < 0.0:
            V[:, j] = -V[:, j]
    return V


def _sorted_pairs(values, vectors):
    order = np.argsort(-values, kind="stable")
    return EigPairs(values[order], fix_signs(vectors[:, order]))


def jacobi_eig_sym(S, tol=1e-12, max_sweeps=MAX_SWEEPS):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    S : (n, n) array_like
        Symmetric input; it is symmetrized before iterating.
    tol : float
        Stop once the off-diagonal Frobenius norm is below ``tol * |S|_F``.

    Returns
    -------
    EigPairs
        Values in descending order, orthonormal eigenvectors as columns.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    A = symmetrize(S, "S").copy()
    tol_abs = tol * np.linalg.norm(A)
    V, _, converged = _jacobi_sweeps(A, tol_abs, max_sweeps)
    if not converged:
        raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
    return _sorted_pairs(np.diag(A).copy(), V)


def gen_eig_sym_def(A, B, tol=1e-12):
    """Solve ``A p = eta B p`` with ``A`` symmetric and ``B`` positive definite.

    With ``B = L L^T`` the problem becomes the standard symmetric problem
    ``C q = eta q`` for ``C = L^-1 A L^-T``, and ``p = L^-T q``. The
    returned vectors are B-orthonormal.
    """
    A = symmetrize(A, "A")
    B = _as_square(B, "B")
    if A.shape != B.shape:
        raise DimensionMismatch(f"A is {A.shape} but B is {B.shape}")
    L = cholesky(B)
    Y = tri_solve(L, A, "lower")          # L^-1 A
    C = tri_solve(L, Y.T, "lower")        # L^-1 A L^-T  (A symmetric)
    C = 0.5 * (C + C.T)
    eig = jacobi_eig_sym(C, tol=tol)
    P = tri_solve(L, eig.vectors, "upper")
    return EigPairs(eig.values, fix_signs(P))
