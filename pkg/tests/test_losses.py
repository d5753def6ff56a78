import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from multiboost import LossKind, loss_gradient, loss_value
from multiboost.losses import dual_weights_from_margins, hessian_vector_product
from multiboost.model import MarginMatrix, scores_to_margins


def zero_margins(m, k, mode="pairwise"):
    return MarginMatrix(np.zeros((m, k)), np.zeros(m, dtype=int), mode)


def test_zero_margin_values():
    assert_allclose(loss_value("logistic", zero_margins(1, 2)), np.log(2))
    assert_allclose(loss_value("exp", zero_margins(1, 2)), np.log(2))


def test_hinge_on_hand_instance():
    H = np.array([[1.0], [-1.0]])
    rho = scores_to_margins(H @ np.array([[1.0, 0.0]]), np.array([0, 1]))
    assert loss_value("hinge", rho) == 0.0
    rho0 = scores_to_margins(np.zeros((2, 2)), np.array([0, 1]))
    assert loss_value("hinge", rho0) == 2.0


def test_hinge_rejects_fast_margins():
    with pytest.raises(ValueError):
        loss_value("hinge", zero_margins(2, 2, "fast"))


def test_dual_weight_examples():
    assert_allclose(dual_weights_from_margins("exp", zero_margins(1, 2)), [[0.5, 0.5]])
    U = dual_weights_from_margins("logistic", zero_margins(1, 2))
    assert_allclose(U, [[0.25, 0.25]])
    assert np.all(U <= 0.5)
    big = MarginMatrix(np.full((1, 2), 800.0), np.zeros(1, dtype=int))
    assert np.all(dual_weights_from_margins("logistic", big) < 1e-300)
    with pytest.raises(NotImplementedError):
        dual_weights_from_margins("hinge", zero_margins(1, 2))


def test_exp_is_overflow_safe():
    rho = MarginMatrix(np.array([[0.0, -2000.0]]), np.zeros(1, dtype=int))
    assert_allclose(loss_value("exp", rho), 2000.0)
    assert np.all(np.isfinite(dual_weights_from_margins("exp", rho)))


def random_instance(rng, m=15, n=4, k=3):
    H = rng.choice([-1.0, 1.0], size=(m, n))
    y0 = rng.integers(0, k, size=m)
    return H, y0


def objective(kind, W, H, y0, mode):
    return loss_value(kind, scores_to_margins(H @ W, y0, mode))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), kind=st.sampled_from(["exp", "logistic"]),
       mode=st.sampled_from(["pairwise", "fast"]))
def test_gradient_matches_central_differences(seed, kind, mode):
    rng = np.random.default_rng(seed)
    H, y0 = random_instance(rng)
    W = rng.exponential(0.3, size=(4, 3))
    g = loss_gradient(kind, W, H, y0, mode)
    fd = np.zeros_like(W)
    h = 1e-5
    for idx in np.ndindex(W.shape):
        E = np.zeros_like(W)
        E[idx] = h
        fd[idx] = (objective(kind, W + E, H, y0, mode)
                   - objective(kind, W - E, H, y0, mode)) / (2 * h)
    assert np.linalg.norm(g - fd) <= 1e-5 * max(np.linalg.norm(fd), 1e-3)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), kind=st.sampled_from(["exp", "logistic"]),
       mode=st.sampled_from(["pairwise", "fast"]))
def test_hessian_vector_product_matches_gradient_differences(seed, kind, mode):
    rng = np.random.default_rng(seed)
    H, y0 = random_instance(rng)
    if kind == "exp" and mode == "fast":
        return
    W = rng.exponential(0.3, size=(4, 3))
    V = rng.normal(size=W.shape)
    hv = hessian_vector_product(kind, W, H, y0, mode)(V)
    h = 1e-5
    fd = (loss_gradient(kind, W + h * V, H, y0, mode)
          - loss_gradient(kind, W - h * V, H, y0, mode)) / (2 * h)
    assert_allclose(hv, fd, rtol=1e-5, atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), kind=st.sampled_from(["exp", "logistic"]))
def test_dual_weights_are_minus_margin_gradient(seed, kind):
    rng = np.random.default_rng(seed)
    m, k = 6, 3
    R = rng.normal(size=(m, k))
    y0 = rng.integers(0, k, size=m)
    U = dual_weights_from_margins(kind, MarginMatrix(R, y0))
    h = 1e-6
    for idx in np.ndindex(R.shape):
        E = np.zeros_like(R)
        E[idx] = h
        d = (loss_value(kind, MarginMatrix(R + E, y0))
             - loss_value(kind, MarginMatrix(R - E, y0))) / (2 * h)
        assert abs(-d - U[idx]) < 1e-8
    if kind == "exp":
        assert abs(U.sum() - 1) < 1e-12
    else:
        assert np.all((U > 0) & (U < 1 / (m * k)))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), kind=st.sampled_from(["hinge", "exp", "logistic"]),
       alpha=st.floats(0, 1))
def test_loss_is_convex_along_segments(seed, kind, alpha):
    rng = np.random.default_rng(seed)
    H, y0 = random_instance(rng)
    A = rng.exponential(size=(4, 3))
    B = rng.exponential(size=(4, 3))
    f = lambda W: objective(kind, W, H, y0, "pairwise")
    assert f(alpha * A + (1 - alpha) * B) <= alpha * f(A) + (1 - alpha) * f(B) + 1e-10


def test_fast_logistic_gradient_at_zero():
    # balanced two-class data, one stump column orthogonal to the labels
    H = np.array([[1.0], [-1.0], [1.0], [-1.0]])
    y0 = np.array([0, 0, 1, 1])
    g = loss_gradient("logistic", np.zeros((1, 2)), H, y0, "fast")
    m, k = 4, 2
    # each term contributes -y_ir h_i / (2mk); they cancel per column
    assert_allclose(g, 0.0, atol=1e-15)
    H2 = np.array([[1.0], [1.0], [-1.0], [-1.0]])
    g2 = loss_gradient("logistic", np.zeros((1, 2)), H2, y0, "fast")
    assert_allclose(g2, [[-4 / (2 * m * k), 4 / (2 * m * k)]])


def test_duplicated_example_doubles_gradient_contribution():
    rng = np.random.default_rng(0)
    H, y0 = random_instance(rng, m=5)
    W = rng.exponential(size=(4, 3))
    # logistic carries 1/(mk); compare unnormalized gradients
    g1 = loss_gradient("logistic", W, H[:1], y0[:1]) * 1 * 3
    g2 = loss_gradient("logistic", W, H[[0, 0]], y0[[0, 0]]) * 2 * 3
    assert_allclose(g2, 2 * g1)


def test_hinge_has_no_gradient():
    with pytest.raises(NotImplementedError):
        loss_gradient("hinge", np.zeros((1, 2)), np.ones((2, 1)), np.array([0, 1]))


def test_loss_kind_flags():
    assert not LossKind.HINGE.smooth
    assert LossKind("exp") is LossKind.EXPONENTIAL
