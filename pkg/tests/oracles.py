"""Independent reference solvers used only by the tests."""

import itertools

import numpy as np
from scipy.special import expit

from multiboost.regularizers import norm_value, prox_rows


def lp_vertices(c, A, b):
    """Minimum of ``c x`` over ``A x >= b, x >= 0`` by enumerating vertices.

    Only for a handful of variables: every basic solution is formed from a
    choice of ``n`` tight constraints among the rows and the bounds.
    """
    m, n = A.shape
    G = np.vstack([A, np.eye(n)])
    h = np.concatenate([b, np.zeros(n)])
    best = (np.inf, None)
    for rows in itertools.combinations(range(m + n), n):
        M = G[list(rows)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, h[list(rows)])
        if np.all(G @ x >= h - 1e-9) and c @ x < best[0] - 1e-12:
            best = (c @ x, x)
    return best


def logistic_loss_grad(W, H, y0, mode="pairwise"):
    m, k = H.shape[0], W.shape[1]
    S = H @ W
    rows = np.arange(m)
    if mode == "pairwise":
        R = S[rows, y0][:, None] - S
        R[rows, y0] = 0.0
    else:
        Y = -np.ones((m, k))
        Y[rows, y0] = 1.0
        R = Y * S
    f = np.logaddexp(0.0, -R).sum() / (m * k)
    P = expit(-R) / (m * k)
    if mode == "pairwise":
        D = P.copy()
        D[rows, y0] -= P.sum(axis=1)
    else:
        D = -Y * P
    return f, H.T @ D


def fista(H, y0, k, nu, reg, mode="pairwise", iters=20000, tol=1e-13):
    """Accelerated proximal gradient for logistic + nu * reg over W >= 0."""
    n = H.shape[1]
    m = H.shape[0]
    # curvature <= 1/(4mk); the pairwise margin map has squared norm
    # at most 2(k+1)||H||^2, the FAST one ||H||^2
    gain = 2.0 * (k + 1) if mode == "pairwise" else 1.0
    L = gain * np.linalg.norm(H, 2) ** 2 / (4 * m * k)
    W = np.zeros((n, k))
    V = W.copy()
    t = 1.0
    for _ in range(iters):
        _, g = logistic_loss_grad(V, H, y0, mode)
        W_new = prox_rows(reg, V - g / L, nu / L, nonneg=True)
        t_new = (1 + np.sqrt(1 + 4 * t * t)) / 2
        V = W_new + (t - 1) / t_new * (W_new - W)
        if np.abs(W_new - W).max() < tol:
            W = W_new
            break
        W, t = W_new, t_new
    f, _ = logistic_loss_grad(W, H, y0, mode)
    return W, f + nu * norm_value(reg, W)


def hinge_objective(W, H, y0, nu, reg):
    S = H @ W
    rows = np.arange(H.shape[0])
    T = 1.0 - (S[rows, y0][:, None] - S)
    T[rows, y0] = 0.0
    return T.max(axis=1).sum() + nu * norm_value(reg, W)
