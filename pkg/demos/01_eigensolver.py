"""
Symmetric and generalized eigenproblems
=======================================

The projections below all come from one kernel: a Jacobi eigensolver for
symmetric matrices, plus a Cholesky reduction for ``A p = eta B p``.
"""

import numpy as np

from driftlens import densela

rng = np.random.default_rng(0)

# a random symmetric matrix and its decomposition
G = rng.standard_normal((6, 6))
S = G + G.T
vals, V = densela.jacobi_eig_sym(S)
print("eigenvalues, descending:", np.round(vals, 4))
print("reconstruction error:", np.linalg.norm(V @ np.diag(vals) @ V.T - S))
print("orthogonality error:", np.linalg.norm(V.T @ V - np.eye(6)))

# each column is signed so that its largest entry is positive
print("leading entries:", np.round(V[np.abs(V).argmax(axis=0), range(6)], 4))

# generalized problem with a positive definite right-hand side
H = rng.standard_normal((6, 6))
B = H @ H.T + 6 * np.eye(6)
eta, P = densela.gen_eig_sym_def(S, B)
print("\ngeneralized eigenvalues:", np.round(eta, 4))
print("residual |A P - B P diag(eta)|:", np.linalg.norm(S @ P - B @ P @ np.diag(eta)))
print("P^T B P is the identity:", np.allclose(P.T @ B @ P, np.eye(6)))

# a rank-one B is not definite; the Cholesky step says so
u = rng.standard_normal(6)
try:
    densela.cholesky(np.outer(u, u))
except densela.NotPositiveDefinite as exc:
    print("\nrank-one B rejected:", exc)
