import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from driftlens.classify import Prediction, accuracy, predict_1nn, predict_centroid
from driftlens.errors import DimensionMismatch, EmptyInput, EmptyReference, LengthMismatch


def _brute_1nn(ref, labels, query):
    out = []
    for q in query.T:
        table = [float(np.sum((q - r) ** 2)) for r in ref.T]
        best = min(range(len(table)), key=lambda i: (table[i], i))
        out.append(labels[best])
    return np.array(out)


class Test1NN:
    def test_exact_match(self):
        ref = np.array([[0.0, 5.0, 9.0]])
        p = predict_1nn(ref, [1, 2, 3], [[5.0]])
        assert p.labels[0] == 2 and p.reference_index[0] == 1

    def test_nearer_point(self):
        assert predict_1nn([[0.0, 10.0]], [1, 2], [[4.0]]).labels[0] == 1

    def test_tie_goes_to_lower_index(self):
        ref, labels, query = np.array([[0.0, 2.0], [0.0, 0.0]]), [2, 1], np.array([[1.0], [0.0]])
        table = [np.sum((query[:, 0] - r) ** 2) for r in ref.T]
        assert table[0] == table[1]  # exhaustive table confirms the tie
        p = predict_1nn(ref, labels, query)
        assert p.reference_index[0] == 0 and p.labels[0] == 2

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        ref = rng.standard_normal((3, 25))
        labels = rng.integers(1, 4, 25)
        query = rng.standard_normal((3, 40))
        np.testing.assert_array_equal(predict_1nn(ref, labels, query).labels,
                                      _brute_1nn(ref, labels, query))

    def test_separated_blobs_leave_one_out(self):
        rng = np.random.default_rng(0)
        centres = np.array([[0.0, 100.0, 0.0], [0.0, 0.0, 100.0]])
        labels = np.repeat([1, 2, 3], 10)
        X = centres[:, labels - 1] + rng.standard_normal((2, 30))
        pred = []
        for i in range(30):
            keep = np.arange(30) != i
            pred.append(predict_1nn(X[:, keep], labels[keep], X[:, [i]]).labels[0])
        assert accuracy(np.array(pred), labels) == 100.0

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_query_permutation(self, seed):
        rng = np.random.default_rng(seed)
        ref, labels = rng.standard_normal((2, 12)), rng.integers(1, 3, 12)
        query = rng.standard_normal((2, 15))
        perm = rng.permutation(15)
        a = predict_1nn(ref, labels, query).labels
        b = predict_1nn(ref, labels, query[:, perm]).labels
        np.testing.assert_array_equal(a[perm], b)

    def test_errors(self):
        with pytest.raises(EmptyReference):
            predict_1nn(np.zeros((2, 0)), [], np.zeros((2, 1)))
        with pytest.raises(DimensionMismatch):
            predict_1nn(np.zeros((2, 3)), [1, 1, 1], np.zeros((3, 1)))
        with pytest.raises(LengthMismatch):
            predict_1nn(np.zeros((2, 3)), [1, 1], np.zeros((2, 1)))


class TestCentroid:
    def test_query_at_mean(self):
        ref = np.array([[0.0, 2.0, 10.0, 12.0]])
        p = predict_centroid(ref, [1, 1, 2, 2], [[11.0]])
        assert p.labels[0] == 2 and p.reference_index[0] == -1

    def test_nearer_centroid(self):
        ref = np.array([[-2.0, 0.0, 0.0, 2.0]])
        assert predict_centroid(ref, [1, 1, 2, 2], [[0.2]]).labels[0] == 2

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        ref, labels = rng.standard_normal((3, 30)), rng.integers(1, 5, 30)
        query = rng.standard_normal((3, 20))
        classes = sorted(set(labels.tolist()))
        means = {c: ref[:, labels == c].mean(axis=1) for c in classes}
        expected = [min(classes, key=lambda c: (np.sum((q - means[c]) ** 2), c)) for q in query.T]
        np.testing.assert_array_equal(predict_centroid(ref, labels, query).labels, expected)


class TestAccuracy:
    def test_perfect(self):
        assert accuracy(np.array([1, 2, 3]), [1, 2, 3]) == 100.0

    def test_all_wrong(self):
        assert accuracy(np.array([2, 3, 1]), [1, 2, 3]) == 0.0

    def test_three_of_four(self):
        pred = Prediction(np.array([1, 2, 3, 4]), np.zeros(4, int))
        assert accuracy(pred, [1, 2, 3, 1]) == 75.0

    def test_errors(self):
        with pytest.raises(LengthMismatch):
            accuracy(np.array([1, 2]), [1])
        with pytest.raises(EmptyInput):
            accuracy(np.array([], int), [])

    @pytest.mark.parametrize("pred", list(itertools.product([1, 2], repeat=3)))
    def test_bounded(self, pred):
        assert 0.0 <= accuracy(np.array(pred), [1, 2, 1]) <= 100.0
