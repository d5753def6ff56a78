import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_array_equal, assert_allclose

from multiboost import (Dataset, DecisionStump, EnsembleModel, MarginMode, margins,
                        predict, response_matrix)


def one_stump_model(W):
    # threshold below any input, so h(x) = +1 everywhere
    return EnsembleModel((DecisionStump(0, -10.0, 1),), np.array(W, dtype=float), k=len(W[0]))


def test_predict_single_column():
    assert predict(one_stump_model([[1.0, 0.0]]), np.array([0.0])) == 1


def test_predict_tie_goes_to_smallest_class():
    assert predict(one_stump_model([[0.5, 0.5]]), np.array([0.0])) == 1


def test_predict_hand_solved_lp_model():
    # H = (+1, -1): stump at threshold 0.5 on x = (1, 0)
    model = EnsembleModel((DecisionStump(0, 0.5, 1),), np.array([[1.0, 0.0]]), k=2)
    X = np.array([[1.0], [0.0]])
    assert_array_equal(model.predict(X), [1, 2])


def test_predict_dimension_mismatch():
    model = EnsembleModel((DecisionStump(2, 0.0, 1),), np.ones((1, 2)), k=2)
    with pytest.raises(ValueError):
        predict(model, np.zeros(2))
    with pytest.raises(ValueError):
        predict(model, np.zeros((1, 3)))


def test_margins_zero_model():
    data = Dataset(np.random.default_rng(0).normal(size=(5, 2)), [1, 2, 3, 1, 2])
    model = EnsembleModel((DecisionStump(0, 0.0, 1),), np.zeros((1, 3)), k=3)
    for mode in MarginMode:
        assert np.all(margins(model, data, mode).values == 0)


def test_margins_hand_example():
    data = Dataset(np.array([[0.0]]), [1], k=2)
    model = one_stump_model([[2.0, 0.5]])
    assert_allclose(margins(model, data, "pairwise").values, [[0.0, 1.5]])
    assert_allclose(margins(model, data, "fast").values, [[2.0, -0.5]])


def test_stump_boundary_is_strict():
    s = DecisionStump(0, 1.0, 1)
    assert_array_equal(s(np.array([[1.0], [1.0 + 1e-12], [0.0]])), [-1, 1, -1])


def test_stump_column_examples():
    X = np.array([[0.0], [1.0]])
    assert_array_equal(DecisionStump(0, 0.5, 1)(X), [-1, 1])
    assert_array_equal(DecisionStump(0, 0.5, -1)(X), [1, -1])
    assert_array_equal(DecisionStump(0, -5.0, 1)(X), [1, 1])


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset(np.zeros((2, 1)), [0, 1])
    with pytest.raises(ValueError):
        Dataset(np.zeros((2, 1)), [1])
    with pytest.raises(ValueError):
        Dataset(np.array([[np.nan]]), [1])
    with pytest.raises(ValueError):
        Dataset(np.zeros((1, 1)), [3], k=2)
    with pytest.raises(ValueError):
        Dataset(np.zeros((2, 1)), [1, 1]).check_trainable()


def test_model_rejects_negative_weights():
    with pytest.raises(ValueError):
        one_stump_model([[-1.0, 0.0]])


def random_model(rng, n, k, d):
    stumps = tuple(DecisionStump(int(rng.integers(d)), float(rng.normal()),
                                 int(rng.choice([-1, 1]))) for _ in range(n))
    return EnsembleModel(stumps, rng.exponential(size=(n, k)), k)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 6), k=st.integers(2, 5))
def test_class_permutation_maps_predictions(seed, n, k):
    rng = np.random.default_rng(seed)
    model = random_model(rng, n, k, 3)
    X = rng.normal(size=(30, 3))
    perm = rng.permutation(k)
    permuted = EnsembleModel(model.stumps, model.weights[:, perm], k)
    S = model.decision_function(X)
    # compare only rows without ties, where the tie-break could differ
    top = np.sort(S, axis=1)
    clear = top[:, -1] - top[:, -2] > 1e-12
    # column c of the permuted model holds class perm[c]
    assert_array_equal(perm[permuted.predict(X)[clear] - 1] + 1, model.predict(X)[clear])


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 6), k=st.integers(2, 5))
def test_zero_row_does_not_change_predictions(seed, n, k):
    rng = np.random.default_rng(seed)
    model = random_model(rng, n, k, 3)
    X = rng.normal(size=(30, 3))
    bigger = model.with_extra_row(DecisionStump(1, 0.3, -1))
    assert_array_equal(bigger.predict(X), model.predict(X))


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 6), k=st.integers(2, 5))
def test_pairwise_margin_properties(seed, n, k):
    rng = np.random.default_rng(seed)
    model = random_model(rng, n, k, 3)
    X = rng.normal(size=(40, 3))
    y = rng.integers(1, k + 1, size=40)
    data = Dataset(X, y, k=k)
    rho = margins(model, data).values
    assert np.all(rho[np.arange(40), data.y0] == 0.0)
    others = rho.copy()
    others[np.arange(40), data.y0] = np.inf
    worst = others.min(axis=1)
    S = model.decision_function(X)
    top = np.sort(S, axis=1)
    clear = top[:, -1] - top[:, -2] > 1e-12
    correct = model.predict(X) == y
    assert_array_equal(correct[clear], (worst > 0)[clear])


def test_fast_margins_structure():
    rng = np.random.default_rng(3)
    model = random_model(rng, 4, 3, 2)
    data = Dataset(rng.normal(size=(10, 2)), rng.integers(1, 4, size=10), k=3)
    rho = margins(model, data, "fast").values
    Y = -np.ones((10, 3))
    Y[np.arange(10), data.y0] = 1
    assert_array_equal(rho, Y * (response_matrix(model.stumps, data.features) @ model.weights))
