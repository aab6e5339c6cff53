"""Projection models: PCA, LDA, DRCA and D-DRCA.

Every fit returns a :class:`SubspaceModel` whose ``projection`` columns
are the leading (generalized) eigenvectors, ordered by descending
eigenvalue. DRCA and D-DRCA maximize a trace ratio whose denominator is
the rank-one mean-discrepancy matrix ``u u^T``; that matrix is singular,
so it is replaced by ``u u^T + eps I`` with ``eps`` relative to its trace.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import densela
from .errors import DimensionMismatch, DimensionTooLarge, MissingLabels
from .scatter import (
    LabeledDataset,
    between_class_scatter,
    mdd_matrix,
    mean_vector,
    scaled_second_moment,
    within_class_scatter,
)

METHODS = ("pca", "lda", "drca", "ddrca")
MODEL_FORMAT = "driftlens.subspace"
MODEL_VERSION = 1


@dataclass(frozen=True)
class HyperParams:
    """Subspace dimension ``d`` and the trade-off weights.

    ``lam`` weights the target moment, ``kappa`` the within-class scatter
    and ``mu`` the between-class scatter. ``ridge_tau`` sets the ridge added
    to the mean-discrepancy denominator.
    """

    d: int = 1
    lam: float = 1.0
    kappa: float = 0.0
    mu: float = 0.0
    ridge_tau: float = 1e-3

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        for name in ("lam", "kappa", "mu"):
            value = float(getattr(self, name))
            if not value >= 0:
                raise ValueError(f"{name} must be >= 0, got {value}")
            object.__setattr__(self, name, value)
        if not self.ridge_tau > 0:
            raise ValueError(f"ridge_tau must be > 0, got {self.ridge_tau}")
        object.__setattr__(self, "ridge_tau", float(self.ridge_tau))

    def key(self):
        """Tie-break key used when ranking grid results."""
        return (self.d, self.lam, self.kappa, self.mu)


@dataclass(frozen=True, eq=False)
class SubspaceModel:
    projection: np.ndarray
    eigenvalues: np.ndarray
    method: str
    params: HyperParams
    source_mean: np.ndarray | None = None
    target_mean: np.ndarray | None = None

    @property
    def dim(self):
        return self.projection.shape[0]

    @property
    def d(self):
        return self.projection.shape[1]

    def truncate(self, d):
        """Keep the leading ``d`` directions."""
        if not 1 <= d <= self.d:
            raise DimensionTooLarge(f"cannot keep {d} of {self.d} directions")
        return replace(
            self,
            projection=self.projection[:, :d].copy(),
            eigenvalues=self.eigenvalues[:d].copy(),
            params=replace(self.params, d=d),
        )

    def to_dict(self):
        def vec(v):
            return None if v is None else [float(x) for x in v]

        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "method": self.method,
            "params": asdict(self.params),
            "D": self.dim,
            "d": self.d,
            "projection": [float(x) for x in self.projection.ravel()],
            "eigenvalues": vec(self.eigenvalues),
            "source_mean": vec(self.source_mean),
            "target_mean": vec(self.target_mean),
        }

    @classmethod
    def from_dict(cls, doc):
        if doc.get("format") != MODEL_FORMAT:
            raise ValueError(f"not a driftlens model document: {doc.get('format')!r}")
        if doc.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported model version {doc.get('version')!r}")
        D, d = int(doc["D"]), int(doc["d"])
        P = np.array(doc["projection"], dtype=np.float64)
        if P.size != D * d:
            raise DimensionMismatch(f"projection has {P.size} entries, expected {D}x{d}")

        def vec(v):
            return None if v is None else np.array(v, dtype=np.float64)

        return cls(
            projection=P.reshape(D, d),
            eigenvalues=vec(doc["eigenvalues"]),
            method=doc["method"],
            params=HyperParams(**doc["params"]),
            source_mean=vec(doc.get("source_mean")),
            target_mean=vec(doc.get("target_mean")),
        )

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(fh.read())


def _check_d(d, limit, what):
    if not 1 <= d <= limit:
        raise DimensionTooLarge(f"d={d} must lie in 1..{limit} ({what})")


def _matrix(X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch(f"expected a D x N matrix, got shape {X.shape}")
    return X


def ridged_mdd(mean_src, mean_tgt, ridge_tau):
    """``u u^T + eps I`` with ``eps = ridge_tau * trace(u u^T) / D + 1e-12``."""
    M = mdd_matrix(mean_src, mean_tgt)
    D = M.shape[0]
    eps = ridge_tau * np.trace(M) / D + 1e-12
    return M + eps * np.eye(D)


def _top(pairs, d):
    return pairs.vectors[:, :d].copy(), pairs.values[:d].copy()


def fit_pca(X, d):
    """Principal directions of the centered covariance ``(1/N) Xc Xc^T``."""
    X = _matrix(X)
    _check_d(d, X.shape[0], "feature dimension")
    mean = mean_vector(X)
    Xc = X - mean[:, None]
    cov = scaled_second_moment(Xc, 1.0 / X.shape[1])
    P, values = _top(densela.jacobi_eig_sym(cov), d)
    return SubspaceModel(P, values, "pca", HyperParams(d=d), source_mean=mean)


def fit_lda(data, d):
    """Fisher LDA with classical per-sample scatter weights.

    Solves ``S_b p = eta (S_w + gamma I) p`` with
    ``gamma = 1e-6 * trace(S_w) / D + 1e-12``.
    """
    if data.labels is None:
        raise MissingLabels("LDA needs labeled data")
    X, y = data.features, data.labels
    present = data.classes()
    _check_d(d, present.size - 1, "number of classes - 1")
    D = X.shape[0]
    m = X.mean(axis=1)
    S_w = np.zeros((D, D))
    S_b = np.zeros((D, D))
    for label in present:
        Xl = X[:, y == label]
        ml = Xl.mean(axis=1)
        Z = Xl - ml[:, None]
        S_w += Z @ Z.T
        S_b += Xl.shape[1] * np.outer(ml - m, ml - m)
    S_w = 0.5 * (S_w + S_w.T)
    gamma = 1e-6 * np.trace(S_w) / D + 1e-12
    pairs = densela.gen_eig_sym_def(0.5 * (S_b + S_b.T), S_w + gamma * np.eye(D))
    P, values = _top(pairs, d)
    return SubspaceModel(P, values, "lda", HyperParams(d=d), source_mean=m)


def fit_drca(X_s, X_t, d, lam=1.0, ridge_tau=1e-3):
    """DRCA: maximize ``X_s X_s^T + lam X_t X_t^T`` against the mean gap."""
    X_s, X_t = _matrix(X_s), _matrix(X_t)
    if X_s.shape[0] != X_t.shape[0]:
        raise DimensionMismatch(f"source D={X_s.shape[0]}, target D={X_t.shape[0]}")
    params = HyperParams(d=d, lam=lam, ridge_tau=ridge_tau)
    _check_d(d, X_s.shape[0], "feature dimension")
    ms, mt = mean_vector(X_s), mean_vector(X_t)
    A = X_s @ X_s.T + lam * (X_t @ X_t.T)
    A = 0.5 * (A + A.T)
    pairs = densela.gen_eig_sym_def(A, ridged_mdd(ms, mt, ridge_tau))
    P, values = _top(pairs, d)
    return SubspaceModel(P, values, "drca", params, ms, mt)


def ddrca_numerator(source, X_t, params):
    """Numerator matrix of the D-DRCA trace ratio.

    ``(1/N_s) X_s X_s^T + lam (1/N_t) X_t X_t^T - kappa D_wc + mu D_bc``
    """
    Xs = source.features
    A = (
        scaled_second_moment(Xs, 1.0 / Xs.shape[1])
        + params.lam * scaled_second_moment(X_t, 1.0 / X_t.shape[1])
        - params.kappa * within_class_scatter(source)
        + params.mu * between_class_scatter(source)
    )
    return 0.5 * (A + A.T)


def fit_ddrca(source, X_t, params):
    """D-DRCA: DRCA plus within-class (penalized) and between-class terms."""
    if not isinstance(source, LabeledDataset) or source.labels is None:
        raise MissingLabels("D-DRCA needs a labeled source dataset")
    X_t = _matrix(X_t)
    if X_t.shape[0] != source.dim:
        raise DimensionMismatch(f"source D={source.dim}, target D={X_t.shape[0]}")
    _check_d(params.d, source.dim, "feature dimension")
    ms, mt = mean_vector(source.features), mean_vector(X_t)
    A = ddrca_numerator(source, X_t, params)
    pairs = densela.gen_eig_sym_def(A, ridged_mdd(ms, mt, params.ridge_tau))
    P, values = _top(pairs, params.d)
    return SubspaceModel(P, values, "ddrca", params, ms, mt)


def fit(method, source, X_t, params):
    """Dispatch to the fit for ``method``; target labels are never consulted."""
    if method == "pca":
        return fit_pca(source.features, params.d)
    if method == "lda":
        return fit_lda(source, params.d)
    if method == "drca":
        return fit_drca(source.features, X_t, params.d, params.lam, params.ridge_tau)
    if method == "ddrca":
        return fit_ddrca(source, X_t, params)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def transform(model, X):
    """Project samples: ``P^T X`` (PCA centers on the stored source mean first)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.shape[0] != model.dim:
        raise DimensionMismatch(f"model expects D={model.dim}, data has {X.shape[0]} rows")
    if model.method == "pca" and model.source_mean is not None:
        X = X - model.source_mean[:, None]
    return model.projection.T @ X
