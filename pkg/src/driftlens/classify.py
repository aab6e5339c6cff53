"""Nearest-neighbour and nearest-centroid classification in the projected space."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, EmptyInput, EmptyReference, LengthMismatch

_CHUNK = 2048


class Prediction(NamedTuple):
    labels: np.ndarray
    reference_index: np.ndarray  # deciding reference column, -1 for centroids


def _check(ref, ref_labels, query):
    ref = np.asarray(ref, dtype=np.float64)
    query = np.asarray(query, dtype=np.float64)
    if ref.ndim == 1:
        ref = ref.reshape(1, -1)
    if query.ndim == 1:
        query = query.reshape(1, -1)
    ref_labels = np.asarray(ref_labels, dtype=np.int64)
    if ref.shape[1] == 0:
        raise EmptyReference("reference set is empty")
    if ref.shape[0] != query.shape[0]:
        raise DimensionMismatch(f"reference d={ref.shape[0]}, query d={query.shape[0]}")
    if ref_labels.shape != (ref.shape[1],):
        raise LengthMismatch(f"{ref_labels.size} labels for {ref.shape[1]} references")
    return ref, ref_labels, query


def _nearest(ref, query):
    """Index of the nearest column of ``ref`` for each column of ``query``.

    Squared distances use the expansion |q|^2 - 2 q.r + |r|^2; ``argmin``
    returns the lowest index among exact ties.
    """
    rr = np.einsum("ij,ij->j", ref, ref)
    out = np.empty(query.shape[1], dtype=np.int64)
    for start in range(0, query.shape[1], _CHUNK):
        Q = query[:, start:start + _CHUNK]
        qq = np.einsum("ij,ij->j", Q, Q)
        dist = qq[:, None] - 2.0 * (Q.T @ ref) + rr[None, :]
        out[start:start + Q.shape[1]] = np.argmin(dist, axis=1)
    return out


def predict_1nn(ref, ref_labels, query):
    """Label each query column with the label of its Euclidean-nearest reference."""
    ref, ref_labels, query = _check(ref, ref_labels, query)
    idx = _nearest(ref, query)
    return Prediction(ref_labels[idx], idx)


def predict_centroid(ref, ref_labels, query):
    """Label each query column with the nearest class mean (ties: lowest label)."""
    ref, ref_labels, query = _check(ref, ref_labels, query)
    classes = np.unique(ref_labels)
    centroids = np.stack([ref[:, ref_labels == c].mean(axis=1) for c in classes], axis=1)
    idx = _nearest(centroids, query)
    return Prediction(classes[idx], np.full(idx.shape, -1, dtype=np.int64))


CLASSIFIERS = {"1nn": predict_1nn, "centroid": predict_centroid}


def accuracy(pred, truth):
    """Percentage of matching labels, in ``[0, 100]``."""
    labels = pred.labels if isinstance(pred, Prediction) else np.asarray(pred)
    truth = np.asarray(truth)
    if labels.shape != truth.shape:
        raise LengthMismatch(f"{labels.size} predictions for {truth.size} labels")
    if truth.size == 0:
        raise EmptyInput("no predictions to score")
    return 100.0 * np.count_nonzero(labels == truth) / truth.size
