"""Means, second moments and class scatter matrices.

Samples are stored column-wise: a dataset with ``N`` samples of ``D``
features is a ``(D, N)`` array. Class labels are dense integers ``1..c``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyClass,
    EmptyDataset,
    MissingLabels,
    NonFiniteValue,
)


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Feature matrix (D x N) with optional labels and per-sample batch ids.

    ``labels`` may be ``None`` for unlabeled target data. ``n_classes`` is
    the size of the label space; it defaults to the largest label present,
    so a batch that happens to lack a class keeps the shared numbering.
    ``class_ids`` optionally records the original label value of each dense
    class (``class_ids[k - 1]`` for class ``k``).
    """

    features: np.ndarray
    labels: np.ndarray | None = None
    name: str = ""
    batch: np.ndarray | None = None
    n_classes: int | None = None
    class_ids: tuple | None = None

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        if X.ndim != 2:
            raise DimensionMismatch(f"features must be 2-D (D x N), got {X.shape}")
        if not np.all(np.isfinite(X)):
            raise NonFiniteValue(f"dataset {self.name!r} has non-finite features")
        object.__setattr__(self, "features", X)
        if self.labels is not None:
            y = np.asarray(self.labels)
            if y.ndim != 1 or y.shape[0] != X.shape[1]:
                raise DimensionMismatch(
                    f"{y.shape[0] if y.ndim == 1 else y.shape} labels for {X.shape[1]} samples"
                )
            if y.size and not np.issubdtype(y.dtype, np.integer):
                if not np.all(y == np.round(y)):
                    raise ValueError("labels must be integers")
            y = y.astype(np.int64)
            c = self.n_classes if self.n_classes is not None else int(y.max(initial=0))
            if y.size and (y.min() < 1 or y.max() > c):
                raise ValueError(f"labels must lie in 1..{c}")
            object.__setattr__(self, "labels", y)
            object.__setattr__(self, "n_classes", c)
        if self.batch is not None:
            b = np.asarray(self.batch, dtype=np.int64)
            if b.shape != (X.shape[1],):
                raise DimensionMismatch("batch ids must have one entry per sample")
            object.__setattr__(self, "batch", b)

    @property
    def dim(self):
        return self.features.shape[0]

    @property
    def n_samples(self):
        return self.features.shape[1]

    def classes(self):
        """Labels that actually occur, ascending."""
        if self.labels is None:
            raise MissingLabels(f"dataset {self.name!r} has no labels")
        return np.unique(self.labels)

    def class_counts(self):
        """Samples per label ``1..n_classes`` (zeros for absent classes)."""
        if self.labels is None:
            raise MissingLabels(f"dataset {self.name!r} has no labels")
        return np.bincount(self.labels, minlength=self.n_classes + 1)[1:]

    def with_features(self, features, name=None):
        return LabeledDataset(
            features, self.labels, self.name if name is None else name,
            self.batch, self.n_classes, self.class_ids,
        )

    def without_labels(self):
        return LabeledDataset(self.features, None, self.name, self.batch)

    def original_labels(self):
        """Labels translated back through ``class_ids`` when present."""
        if self.labels is None:
            raise MissingLabels(f"dataset {self.name!r} has no labels")
        if self.class_ids is None:
            return self.labels.copy()
        return np.asarray(self.class_ids)[self.labels - 1]


def concat_datasets(datasets, name=""):
    """Stack datasets sample-wise; batch ids default to 1, 2, ... by position."""
    datasets = list(datasets)
    if not datasets:
        raise EmptyDataset("nothing to concatenate")
    X = np.concatenate([ds.features for ds in datasets], axis=1)
    batch = np.concatenate([
        ds.batch if ds.batch is not None else np.full(ds.n_samples, k + 1)
        for k, ds in enumerate(datasets)
    ])
    labels = None
    n_classes = None
    class_ids = datasets[0].class_ids
    if all(ds.labels is not None for ds in datasets):
        labels = np.concatenate([ds.labels for ds in datasets])
        n_classes = max(ds.n_classes for ds in datasets)
    if any(ds.class_ids != class_ids for ds in datasets):
        class_ids = None
    return LabeledDataset(X, labels, name, batch, n_classes, class_ids)


@dataclass
class ScatterSet:
    source_moment: np.ndarray
    target_moment: np.ndarray
    mdd: np.ndarray
    d_wc: np.ndarray
    d_bc: np.ndarray
    mean_src: np.ndarray
    mean_tgt: np.ndarray
    class_means: list = field(default_factory=list)


def _matrix(X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    return X


def mean_vector(X):
    X = _matrix(X)
    if X.shape[1] == 0:
        raise EmptyDataset("cannot average zero samples")
    return X.mean(axis=1)


def mdd_matrix(mean_src, mean_tgt):
    """Rank-one matrix ``u u^T`` with ``u = mean_src - mean_tgt``."""
    a = np.asarray(mean_src, dtype=np.float64).ravel()
    b = np.asarray(mean_tgt, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise DimensionMismatch(f"mean lengths differ: {a.size} vs {b.size}")
    u = a - b
    return np.outer(u, u)


def scaled_second_moment(X, scale=1.0):
    """``scale * X @ X.T`` (uncentered)."""
    X = _matrix(X)
    if X.shape[1] == 0:
        raise EmptyDataset("cannot form a moment of zero samples")
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale}")
    M = scale * (X @ X.T)
    return 0.5 * (M + M.T)


def _labeled(data):
    if data.labels is None:
        raise MissingLabels(f"dataset {data.name!r} has no labels")
    if data.n_samples == 0:
        raise EmptyDataset(f"dataset {data.name!r} is empty")
    counts = data.class_counts()
    empty = np.flatnonzero(counts == 0)
    if empty.size:
        raise EmptyClass(f"class {empty[0] + 1} of {data.name!r} has no samples")
    return counts


def class_means(data):
    """Mean of each class ``1..c``."""
    counts = _labeled(data)
    X, y = data.features, data.labels
    return [X[:, y == label].mean(axis=1) for label in range(1, counts.size + 1)]


def within_class_scatter(data):
    """Sum over classes of ``1/(c n_l)`` times the class's centered outer products.

    ``c`` is ``data.n_classes``; every class must have at least one sample.
    """
    counts = _labeled(data)
    X, y = data.features, data.labels
    c = counts.size
    S = np.zeros((data.dim, data.dim))
    for label in range(1, c + 1):
        Xl = X[:, y == label]
        Z = Xl - Xl.mean(axis=1, keepdims=True)
        S += (Z @ Z.T) / (c * Xl.shape[1])
    return 0.5 * (S + S.T)


def between_class_scatter(data):
    """Sum over classes of ``n_l/c`` times the outer product of (class mean - mean)."""
    counts = _labeled(data)
    X, y = data.features, data.labels
    c = counts.size
    m = X.mean(axis=1)
    S = np.zeros((data.dim, data.dim))
    for label in range(1, c + 1):
        g = X[:, y == label].mean(axis=1) - m
        S += (counts[label - 1] / c) * np.outer(g, g)
    return 0.5 * (S + S.T)


def scatter_set(source, X_t):
    """All matrices entering the D-DRCA objective for one source/target pair."""
    X_t = _matrix(X_t)
    if X_t.shape[0] != source.dim:
        raise DimensionMismatch(f"source D={source.dim}, target D={X_t.shape[0]}")
    Xs = source.features
    ms, mt = mean_vector(Xs), mean_vector(X_t)
    return ScatterSet(
        source_moment=scaled_second_moment(Xs, 1.0 / Xs.shape[1]),
        target_moment=scaled_second_moment(X_t, 1.0 / X_t.shape[1]),
        mdd=mdd_matrix(ms, mt),
        d_wc=within_class_scatter(source),
        d_bc=between_class_scatter(source),
        mean_src=ms,
        mean_tgt=mt,
        class_means=class_means(source),
    )
