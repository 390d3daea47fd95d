import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from citruspipe.classify import standardize_apply, standardize_fit


def test_constant_column_maps_to_zero():
    X = np.array([[0.1, 1.0], [0.1, 2.0], [0.1, 4.0]])
    Z = standardize_apply(standardize_fit(X), X)
    assert np.all(Z[:, 0] == 0.0)


def test_train_statistics_reused_for_test():
    s = standardize_fit(np.array([[0.0], [2.0]]))  # mean 1, std 1
    np.testing.assert_array_equal(standardize_apply(s, np.array([[5.0], [-1.0]])), [[4.0], [-2.0]])


@given(arrays(np.float64, st.tuples(st.integers(2, 30), st.integers(1, 6)), elements=st.floats(-1e3, 1e3)))
@settings(max_examples=60, deadline=None)
def test_transformed_training_matrix(X):
    s = standardize_fit(X)
    Z = standardize_apply(s, X)
    assert np.all(s.stds > 0)
    assert np.all(np.abs(Z.mean(axis=0)) <= 1e-9)
    sd = Z.std(axis=0)
    live = X.std(axis=0) > 1e-6
    np.testing.assert_allclose(sd[live], 1.0, rtol=1e-6)
    const = np.all(X == X[0], axis=0)
    assert np.all(Z[:, const] == 0)
