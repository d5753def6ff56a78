"""Convex margin losses, their gradients, and KKT dual-weight maps.

Every smooth loss here is written as a function of the margin matrix rho and
its dual weights are ``U = -dL/drho``:

* exponential (log form): ``L = log sum_ir exp(-rho_ir)``,
  ``U = softmax(-rho)`` over the whole matrix, so ``sum U = 1``.
* logistic: ``L = (1/mk) sum_ir log(1 + exp(-rho_ir))``,
  ``U_ir = sigmoid(-rho_ir) / (mk)``, so ``0 < U < 1/(mk)``.

The hinge loss is piecewise linear; its dual weights come from the master
solver, never from a closed form.
"""

from enum import Enum

import numpy as np
from scipy.special import expit, logsumexp

from .model import MarginMatrix, MarginMode, scores_to_margins, sign_matrix

__all__ = [
    "LossKind",
    "dual_weights_from_margins",
    "hinge_terms",
    "loss_gradient",
    "loss_value",
]


class LossKind(str, Enum):
    HINGE = "hinge"
    EXPONENTIAL = "exp"
    LOGISTIC = "logistic"

    @property
    def smooth(self):
        return self is not LossKind.HINGE


def hinge_terms(rho, labels0):
    """Per-example slack ``max(0, max_{r != y_i} (1 - rho_ir))``."""
    m = rho.shape[0]
    t = 1.0 - rho
    t[np.arange(m), labels0] = 0.0
    return t.max(axis=1)


def _log1pexp(z):
    # log(1 + exp(z)) without overflow
    return np.logaddexp(0.0, z)


def loss_value(kind, rho):
    """Loss of a ``MarginMatrix`` (regularizer not included)."""
    kind = LossKind(kind)
    R = rho.values
    m, k = R.shape
    if kind is LossKind.HINGE:
        if rho.mode is not MarginMode.PAIRWISE:
            raise ValueError("the hinge loss is defined on pairwise margins only")
        return float(hinge_terms(R, rho.labels0).sum())
    if kind is LossKind.EXPONENTIAL:
        return float(logsumexp(-R))
    return float(_log1pexp(-R).sum() / (m * k))


def dual_weights_from_margins(kind, rho):
    kind = LossKind(kind)
    R = rho.values
    m, k = R.shape
    if kind is LossKind.HINGE:
        raise NotImplementedError("hinge dual weights come from the master solver")
    if kind is LossKind.EXPONENTIAL:
        a = -R
        e = np.exp(a - a.max())
        return e / e.sum()
    return expit(-R) / (m * k)


def loss_gradient(kind, W, H, labels0, mode=MarginMode.PAIRWISE):
    """Gradient of the loss with respect to the n x k weight matrix ``W``.

    With ``G`` the pricing weights (``edge_weights``) this is ``-H^T G``.
    """
    kind = LossKind(kind)
    if not kind.smooth:
        raise NotImplementedError("the hinge loss has no gradient")
    mode = MarginMode(mode)
    rho = scores_to_margins(H @ W, labels0, mode)
    U = dual_weights_from_margins(kind, rho)
    return -H.T @ _dloss_dscores_neg(U, labels0, mode)


def _dloss_dscores_neg(U, labels0, mode):
    m = U.shape[0]
    if mode is MarginMode.FAST:
        return sign_matrix(labels0, U.shape[1]) * U
    G = -U.copy()
    G[np.arange(m), labels0] += U.sum(axis=1)
    return G


def value_and_grad(kind, W, H, labels0, mode=MarginMode.PAIRWISE, scale=None):
    """``(loss, dloss/dW, U)`` in one pass; used by the inner solvers.

    ``scale`` overrides the logistic ``1/(mk)`` factor; the consensus solver
    evaluates each data block on the global normalization.
    """
    kind = LossKind(kind)
    mode = MarginMode(mode)
    S = H @ W
    rho = scores_to_margins(S, labels0, mode)
    R = rho.values
    m, k = R.shape
    if kind is LossKind.EXPONENTIAL:
        f = logsumexp(-R)
        U = np.exp(-R - f)
    elif kind is LossKind.LOGISTIC:
        if scale is None:
            scale = 1.0 / (m * k)
        f = _log1pexp(-R).sum() * scale
        U = expit(-R) * scale
    else:
        raise NotImplementedError("the hinge loss has no gradient")
    g = -H.T @ _dloss_dscores_neg(U, labels0, mode)
    return float(f), g, U



def _margin_map(H, labels0, mode):
    """The linear map W -> rho and its adjoint."""
    m = H.shape[0]
    rows = np.arange(m)
    if MarginMode(mode) is MarginMode.FAST:
        def forward(dW):
            return sign_matrix(labels0, dW.shape[1]) * (H @ dW)

        def adjoint(R):
            return H.T @ (sign_matrix(labels0, R.shape[1]) * R)
    else:
        def forward(dW):
            dS = H @ dW
            return dS[rows, labels0][:, None] - dS

        def adjoint(R):
            E = -R.copy()
            E[rows, labels0] += R.sum(axis=1)
            return H.T @ E
    return forward, adjoint


def hessian_vector_product(kind, W, H, labels0, mode=MarginMode.PAIRWISE, scale=None):
    """Return ``v -> (d^2 loss / dW^2) v`` at ``W`` (v and W share a shape)."""
    kind = LossKind(kind)
    mode = MarginMode(mode)
    forward, adjoint = _margin_map(H, labels0, mode)
    R = forward(W)
    m, k = R.shape
    if kind is LossKind.EXPONENTIAL:
        a = -R
        p = np.exp(a - a.max())
        p /= p.sum()

        def hv(V):
            d = forward(V)
            return adjoint(p * d - p * np.sum(p * d))
    elif kind is LossKind.LOGISTIC:
        if scale is None:
            scale = 1.0 / (m * k)
        s = expit(R)
        curv = scale * s * (1.0 - s)

        def hv(V):
            return adjoint(curv * forward(V))
    else:
        raise NotImplementedError("the hinge loss has no Hessian")
    return hv
