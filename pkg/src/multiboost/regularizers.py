"""Row-structured norms on the n x k weight matrix and their proximal maps.

Each kind is a sum over stump rows of a vector norm:

=======  ==================  ===============  ======================
kind     row norm            dual row norm    stopping statistic
=======  ==================  ===============  ======================
l1       ||w||_1             ||q||_inf        max_r e_r
l12      ||w||_2             ||q||_2          ||e||_2
l1inf    ||w||_inf           ||q||_1          sum_r max(e_r, 0)
=======  ==================  ===============  ======================

where ``e`` is the per-class edge vector of a candidate stump. With
``W >= 0`` a new row is worth adding only if some ``q`` in the unit dual ball
has ``nu * q >= e`` componentwise, i.e. ``||max(e, 0)||_dual <= nu``. All
three statistics are that dual norm of the positive part. Using the full
vector for l12 would flag optimal rows whose idle classes have negative
edges, so admitted columns would keep pricing in again.
"""

from enum import Enum

import numpy as np

__all__ = [
    "RegKind",
    "dual_norm",
    "norm_value",
    "project_l1_ball",
    "prox_row",
    "prox_rows",
    "stopping_margin",
]


class RegKind(str, Enum):
    L1 = "l1"
    L12 = "l12"
    L1INF = "l1inf"


def norm_value(kind, W):
    kind = RegKind(kind)
    A = np.abs(np.atleast_2d(np.asarray(W, dtype=float)))
    if A.size == 0:
        return 0.0
    if kind is RegKind.L1:
        return float(A.sum())
    if kind is RegKind.L12:
        return float(np.sqrt((A * A).sum(axis=1)).sum())
    return float(A.max(axis=1).sum())


def dual_norm(kind, v):
    """Dual of the row norm, evaluated on a single vector."""
    kind = RegKind(kind)
    a = np.abs(np.asarray(v, dtype=float))
    if kind is RegKind.L1:
        return float(a.max())
    if kind is RegKind.L12:
        return float(np.sqrt(a @ a))
    return float(a.sum())


def project_l1_ball(v, radius):
    """Euclidean projection onto ``{z : ||z||_1 <= radius}`` (sort and threshold)."""
    v = np.asarray(v, dtype=float)
    if radius <= 0:
        return np.zeros_like(v)
    a = np.abs(v)
    if a.sum() <= radius:
        return v.copy()
    u = np.sort(a)[::-1]
    css = np.cumsum(u)
    idx = np.arange(1, u.size + 1)
    pos = np.flatnonzero(u - (css - radius) / idx > 0)
    # a radius below rounding level can leave no positive entry; the largest
    # entry is then the only one kept
    rho = pos[-1] if pos.size else 0
    theta = (css[rho] - radius) / (rho + 1.0)
    return np.sign(v) * np.maximum(a - theta, 0.0)


def prox_row(kind, v, kappa):
    """``argmin_z kappa * ||z|| + 0.5 * ||z - v||^2`` for one row."""
    kind = RegKind(kind)
    v = np.asarray(v, dtype=float)
    if kappa < 0:
        raise ValueError("kappa must be non-negative")
    if kind is RegKind.L1:
        return np.sign(v) * np.maximum(np.abs(v) - kappa, 0.0)
    if kind is RegKind.L12:
        nrm = np.sqrt(v @ v)
        if nrm <= kappa:
            return np.zeros_like(v)
        return (1.0 - kappa / nrm) * v
    # Moreau: prox of kappa*||.||_inf is v minus the projection onto the
    # kappa-scaled unit ball of its dual norm
    return v - project_l1_ball(v, kappa)


def prox_rows(kind, V, kappa, nonneg=False):
    """Row-wise prox over a matrix.

    With ``nonneg`` the prox is taken of ``kappa*norm + indicator(z >= 0)``.
    All three row norms are absolute and monotone, for which that prox equals
    the plain prox applied to ``max(v, 0)``.
    """
    kind = RegKind(kind)
    V = np.atleast_2d(np.asarray(V, dtype=float))
    if nonneg:
        V = np.maximum(V, 0.0)
    if kind is RegKind.L1:
        return np.sign(V) * np.maximum(np.abs(V) - kappa, 0.0)
    if kind is RegKind.L12:
        nrm = np.sqrt((V * V).sum(axis=1, keepdims=True))
        with np.errstate(divide="ignore", invalid="ignore"):
            shrink = np.where(nrm > kappa, 1.0 - kappa / nrm, 0.0)
        return shrink * V
    return np.vstack([prox_row(kind, row, kappa) for row in V]) if len(V) else V.copy()


def stopping_margin(kind, edges):
    """Statistic compared against ``nu + eps`` to stop column generation."""
    e = np.asarray(edges, dtype=float)
    return float(stopping_margins(kind, e[None, :])[0])


def stopping_margins(kind, E):
    """Row-wise ``stopping_margin`` over an ``(n, k)`` stack of edge vectors."""
    kind = RegKind(kind)
    E = np.asarray(E, dtype=float)
    if kind is RegKind.L1:
        return E.max(axis=1)
    P = np.maximum(E, 0.0)
    if kind is RegKind.L12:
        return np.sqrt((P * P).sum(axis=1))
    return P.sum(axis=1)
