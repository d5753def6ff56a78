import numpy as np
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from multiboost import norm_value, prox_row, stopping_margin
from multiboost.regularizers import dual_norm, project_l1_ball, prox_rows

KINDS = ["l1", "l12", "l1inf"]


def test_norm_examples():
    for kind in KINDS:
        assert norm_value(kind, np.zeros((3, 2))) == 0.0
    W = np.array([[3.0, 4.0]])
    assert norm_value("l1", W) == 7.0
    assert norm_value("l12", W) == 5.0
    assert norm_value("l1inf", W) == 4.0
    col = np.array([[1.0], [-2.0], [0.5]])
    assert len({norm_value(kind, col) for kind in KINDS}) == 1


def test_prox_examples():
    assert_allclose(prox_row("l12", [3.0, 4.0], 1.0), [2.4, 3.2])
    assert_allclose(prox_row("l12", [0.3, 0.4], 1.0), [0.0, 0.0])
    assert_allclose(project_l1_ball([3.0, 1.0], 2.0), [2.0, 0.0])
    assert_allclose(prox_row("l1inf", [3.0, 1.0], 2.0), [1.0, 1.0])


def test_stopping_examples():
    for kind in KINDS:
        assert stopping_margin(kind, np.zeros(3)) == 0.0
        assert_allclose(stopping_margin(kind, [0.7]), 0.7)
    e = [0.3, -0.1]
    assert_allclose(stopping_margin("l1", e), 0.3)
    # negative edges are absorbed by the W >= 0 multiplier
    assert_allclose(stopping_margin("l12", e), 0.3)
    assert_allclose(stopping_margin("l12", [0.3, 0.4, -2.0]), 0.5)
    assert_allclose(stopping_margin("l1inf", e), 0.3)


@settings(max_examples=200, deadline=None)
@given(e=st.lists(st.floats(-5, 5), min_size=4, max_size=4), nu=st.floats(0.01, 5))
def test_stopping_is_dual_feasibility(e, nu):
    # a row is dual feasible iff nu*q - p = e with ||q||_dual <= 1, p >= 0
    e = np.array(e)
    pos = np.maximum(e, 0.0)
    for kind in KINDS:
        stat = stopping_margin(kind, e)
        if pos.any():
            assert_allclose(stat, dual_norm(kind, pos), rtol=1e-12)
        if stat <= nu:
            q = pos / nu
            assert dual_norm(kind, q) <= 1 + 1e-12
            assert np.all(nu * q - e >= -1e-12)


def certificate(kind, v, kappa, z, tol=1e-8):
    """Subgradient optimality of z for kappa*||.|| + 0.5||. - v||^2."""
    g = v - z                      # must equal kappa times a subgradient at z
    if np.all(z == 0):
        return dual_norm(kind, v) <= kappa + tol
    if kind == "l1":
        nz = z != 0
        return (np.all(np.abs(g[nz] - kappa * np.sign(z[nz])) <= tol)
                and np.all(np.abs(g[~nz]) <= kappa + tol))
    if kind == "l12":
        return np.all(np.abs(g - kappa * z / np.linalg.norm(z)) <= tol)
    # l1inf: g/kappa lies in the l1 unit ball, is supported on argmax |z|
    # with matching signs, and attains <g, z> = kappa * max|z|
    top = np.abs(z).max()
    on = np.abs(np.abs(z) - top) <= tol
    return (np.abs(g).sum() <= kappa + tol
            and np.all(np.abs(g[~on]) <= tol)
            and np.all(g[on] * np.sign(z[on]) >= -tol)
            and abs(g @ z - kappa * top) <= tol * (1 + top))


def test_prox_certificate_on_random_pairs():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        k = int(rng.integers(1, 7))
        v = rng.normal(scale=2.0, size=k)
        kappa = float(rng.exponential())
        for kind in KINDS:
            z = prox_row(kind, v, kappa)
            assert certificate(kind, v, kappa, z), (kind, v, kappa, z)


def grid_prox(kind, v, kappa, step):
    a = np.arange(-4.0, 4.0 + step / 2, step)
    Z1, Z2 = np.meshgrid(a, a, indexing="ij")
    Z = np.stack([Z1.ravel(), Z2.ravel()], axis=1)
    if kind == "l1":
        nrm = np.abs(Z).sum(axis=1)
    elif kind == "l12":
        nrm = np.sqrt((Z * Z).sum(axis=1))
    else:
        nrm = np.abs(Z).max(axis=1)
    f = kappa * nrm + 0.5 * ((Z - v) ** 2).sum(axis=1)
    return Z[np.argmin(f)]


def test_prox_matches_grid_search():
    rng = np.random.default_rng(1)
    step = 0.01
    for _ in range(50):
        v = rng.uniform(-2.5, 2.5, size=2)
        kappa = float(rng.uniform(0.05, 1.5))
        for kind in KINDS:
            # the objective is 1-strongly convex, so a grid point within
            # step*sqrt(2)/2 of the minimizer pins the argmin to ~step
            assert np.abs(prox_row(kind, v, kappa) - grid_prox(kind, v, kappa, step)).max() \
                <= 1.5 * step


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), kind=st.sampled_from(KINDS),
       kappa=st.floats(0.0, 5.0))
def test_prox_is_nonexpansive(seed, kind, kappa):
    rng = np.random.default_rng(seed)
    v, u = rng.normal(size=(2, 4))
    assert (np.linalg.norm(prox_row(kind, v, kappa) - prox_row(kind, u, kappa))
            <= np.linalg.norm(v - u) + 1e-12)


def test_prox_limits():
    v = np.array([1.0, -2.0, 0.5])
    for kind in KINDS:
        assert_allclose(prox_row(kind, v, 0.0), v)
        assert_allclose(prox_row(kind, v, 1e9), 0.0)


def test_l12_rows_are_zero_or_scaled():
    rng = np.random.default_rng(2)
    V = rng.normal(size=(50, 4))
    Z = prox_rows("l12", V, 1.5)
    for v, z in zip(V, Z):
        if np.any(z != 0):
            scale = z / v
            assert_allclose(scale, scale[0])
            assert np.all(z != 0)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), kind=st.sampled_from(KINDS),
       kappa=st.floats(0.01, 3.0))
def test_nonneg_rows_prox_is_constrained_minimizer(seed, kind, kappa):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=3)
    z = prox_rows(kind, v[None, :], kappa, nonneg=True)[0]
    assert np.all(z >= 0)
    f = lambda x: kappa * norm_value(kind, x[None, :]) + 0.5 * np.sum((x - v) ** 2)
    # no nonnegative random perturbation does better
    for _ in range(200):
        x = np.maximum(z + rng.normal(scale=0.1, size=3), 0.0)
        assert f(x) >= f(z) - 1e-12


def test_prox_rows_matches_prox_row():
    rng = np.random.default_rng(3)
    V = rng.normal(size=(10, 3))
    for kind in KINDS:
        assert_allclose(prox_rows(kind, V, 0.7), [prox_row(kind, v, 0.7) for v in V])
