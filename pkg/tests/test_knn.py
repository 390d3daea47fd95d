from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from citruspipe.classify import knn_fit, knn_predict
from citruspipe.errors import InvalidHyperparameter, ShapeMismatch


def brute_force_knn(X, y, Q, k, n_classes):
    """Pure-Python reference: explicit loops, explicit tie rules."""
    out = []
    for q in Q:
        d = [(sum((float(a) - float(b)) ** 2 for a, b in zip(q, x)), i) for i, x in enumerate(X)]
        d.sort()
        nn = d[:k]
        votes = Counter(int(y[i]) for _, i in nn)
        dist_sum = Counter()
        for dist, i in nn:
            dist_sum[int(y[i])] += dist
        best = min(range(n_classes), key=lambda c: (-votes[c], dist_sum[c], c))
        out.append(best)
    return np.array(out)


def test_three_point_example():
    X = np.array([[0, 0], [1, 0], [10, 10]], dtype=float)
    y = np.array([0, 0, 1])  # A=0, B=1
    assert knn_predict(knn_fit(X, y, k=3), [[0.5, 0]]).tolist() == [0]


def test_k1_returns_own_label():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(30, 4))
    y = rng.integers(0, 3, 30)
    assert np.array_equal(knn_predict(knn_fit(X, y, k=1, n_classes=3), X), y)


def test_k_equals_n_gives_majority():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(9, 2))
    y = np.array([0, 1, 1, 2, 1, 0, 2, 1, 0])
    pred = knn_predict(knn_fit(X, y, k=9), rng.normal(size=(5, 2)))
    assert np.all(pred == 1)


def test_k_too_large():
    with pytest.raises(InvalidHyperparameter):
        knn_fit(np.zeros((3, 2)), [0, 1, 0], k=4)


def test_vote_tie_goes_to_lower_class():
    # one neighbour per class at equal distance; training order puts class 1 first
    X = np.array([[-1.0, 0.0], [1.0, 0.0]])
    y = np.array([1, 0])
    assert knn_predict(knn_fit(X, y, k=2), [[0.0, 0.0]]).tolist() == [0]


def test_vote_tie_goes_to_closer_class():
    X = np.array([[-1.0, 0.0], [2.0, 0.0], [5.0, 0.0]])
    y = np.array([1, 0, 0])
    # k=2: class 1 at d=1, class 0 at d=4 -> tie on count, class 1 is closer
    assert knn_predict(knn_fit(X, y, k=2), [[0.0, 0.0]]).tolist() == [1]


def test_neighbour_tie_lower_training_index():
    # two class-0 and one class-1 points all at distance 1; k=2 keeps indices 0 and 1
    X = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])
    y = np.array([1, 1, 0])
    assert knn_predict(knn_fit(X, y, k=2), [[0.0, 0.0]]).tolist() == [1]


def test_dimension_mismatch():
    m = knn_fit(np.zeros((3, 2)), [0, 1, 0], k=1)
    with pytest.raises(ShapeMismatch):
        knn_predict(m, np.zeros((1, 3)))


def test_matches_brute_force_200_points():
    rng = np.random.default_rng(42)
    X = rng.normal(size=(200, 20))
    y = rng.integers(0, 4, 200)
    Q = rng.normal(size=(60, 20))
    for k in (1, 3, 5, 8):
        np.testing.assert_array_equal(knn_predict(knn_fit(X, y, k=k, n_classes=4), Q), brute_force_knn(X, y, Q, k, 4))


def test_integer_grid_ties_match_brute_force():
    # many exact distance ties on an integer lattice
    rng = np.random.default_rng(7)
    X = rng.integers(0, 3, (40, 3)).astype(float)
    y = rng.integers(0, 3, 40)
    Q = rng.integers(0, 3, (30, 3)).astype(float)
    for k in (2, 4, 6):
        np.testing.assert_array_equal(knn_predict(knn_fit(X, y, k=k, n_classes=3), Q), brute_force_knn(X, y, Q, k, 3))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=15, deadline=None)
def test_orthogonal_invariance(seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(25, 5))
    y = rng.integers(0, 3, 25)
    Q = rng.normal(size=(10, 5))
    R, _ = np.linalg.qr(rng.normal(size=(5, 5)))
    a = knn_predict(knn_fit(X, y, k=3, n_classes=3), Q)
    b = knn_predict(knn_fit(X @ R, y, k=3, n_classes=3), Q @ R)
    np.testing.assert_array_equal(a, b)
