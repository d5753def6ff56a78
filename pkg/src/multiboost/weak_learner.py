"""Exhaustive decision-stump pricing.

For pricing weights ``G`` (m x k) the edge of stump ``h`` on class ``r`` is
``sum_i G[i, r] * h(x_i)``. The search scans every feature, every candidate
threshold and both polarities, and returns the lexicographically smallest
``(feature_index, threshold, polarity (+1 first), class)`` among the maximizers.
"""

from enum import Enum

import numpy as np

from .model import DecisionStump, sign_matrix

__all__ = [
    "EdgeKind",
    "StumpSearcher",
    "best_stump",
    "edge_weights",
    "stump_column",
]


class EdgeKind(str, Enum):
    HINGE = "hinge"
    GRADIENT = "gradient"
    FAST = "fast"


def edge_weights(U, labels0, kind=EdgeKind.HINGE):
    """Pricing weights G for the current dual weights U.

    ``hinge``:    G_ir = [r == y_i] - U_ir
    ``gradient``: G_ir = [r == y_i] * sum_l U_il - U_ir  (exponential, logistic)
    ``fast``:     G_ir = y_ir * U_ir with y_ir = +-1      (one-vs-all margins)

    ``G = -dL/dS`` for a loss ``L`` whose dual weights are ``U``, so the edge of a
    candidate column is minus the directional derivative of the loss along it.
    """
    U = np.asarray(U, dtype=float)
    labels0 = np.asarray(labels0)
    kind = EdgeKind(kind)
    m, k = U.shape
    rows = np.arange(m)
    if kind is EdgeKind.FAST:
        return sign_matrix(labels0, k) * U
    G = -U.copy()
    if kind is EdgeKind.HINGE:
        G[rows, labels0] += 1.0
    else:
        G[rows, labels0] += U.sum(axis=1)
    return G


def stump_column(stump, X):
    return stump(np.atleast_2d(X))


def _candidate_thresholds(values):
    """Sorted candidate thresholds for one feature column.

    One sentinel below the minimum, then the midpoint of each pair of
    consecutive distinct values. Returns the thresholds and, for each, the
    number of sorted examples lying at or below it.
    """
    v = np.sort(values)
    lo = v[0] - max(1.0, abs(v[0]))
    change = np.flatnonzero(v[1:] > v[:-1])
    a, b = v[change], v[change + 1]
    mids = a + (b - a) / 2.0
    # guard against the midpoint rounding onto the upper value
    mids = np.where(mids >= b, a, mids)
    thresholds = np.concatenate([[lo], mids])
    below = np.concatenate([[0], change + 1])
    return thresholds, below


class StumpSearcher:
    """Pricing oracle over a fixed training matrix.

    Sorting is done once at construction; each ``search`` call is a cumulative
    sum per feature.
    """

    def __init__(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
            raise ValueError("need a non-empty 2-D feature matrix")
        self.X = X
        self.order = np.argsort(X, axis=0, kind="stable")
        self.thresholds = []
        self.below = []
        for j in range(X.shape[1]):
            t, b = _candidate_thresholds(X[:, j])
            self.thresholds.append(t)
            self.below.append(b)

    @property
    def n_candidates(self):
        return 2 * sum(len(t) for t in self.thresholds)

    def feature_edges(self, G, j):
        """Edges of every (threshold, polarity, class) on feature ``j``.

        Shape ``(n_thresholds, 2, k)``; polarity axis ordered (+1, -1).
        """
        Gs = G[self.order[:, j]]
        prefix = np.vstack([np.zeros((1, G.shape[1])), np.cumsum(Gs, axis=0)])
        total = prefix[-1]
        # h = +1 above the threshold, -1 at or below it
        plus = total[None, :] - 2.0 * prefix[self.below[j]]
        return np.stack([plus, -plus], axis=1)

    def search(self, G):
        """Return ``(stump, class_index0, edge)`` maximizing the edge."""
        G = np.asarray(G, dtype=float)
        if G.shape[0] != self.X.shape[0]:
            raise ValueError("G must have one row per training example")
        if not np.all(np.isfinite(G)):
            raise ValueError("pricing weights are not finite")
        best = None
        best_val = -np.inf
        for j in range(self.X.shape[1]):
            E = self.feature_edges(G, j)
            flat = int(np.argmax(E))
            val = E.flat[flat]
            if val > best_val:
                t, p, r = np.unravel_index(flat, E.shape)
                best_val = val
                best = (j, self.thresholds[j][t], 1 if p == 0 else -1, int(r))
        j, thr, pol, r = best
        stump = DecisionStump(j, thr, pol)
        edge = float(stump_column(stump, self.X) @ G[:, r])
        return stump, r, edge

    def search_rows(self, G, score):
        """Return ``(stump, edge_vector, value)`` maximizing ``score``.

        ``score`` maps an ``(n, k)`` stack of edge vectors to ``n`` values.
        """
        G = np.asarray(G, dtype=float)
        best, best_val = None, -np.inf
        for j in range(self.X.shape[1]):
            E = self.feature_edges(G, j)
            vals = np.asarray(score(E.reshape(-1, G.shape[1])))
            flat = int(np.argmax(vals))
            if vals[flat] > best_val:
                t, p = divmod(flat, 2)
                best_val = float(vals[flat])
                best = DecisionStump(j, self.thresholds[j][t], 1 if p == 0 else -1)
        return best, self.edge_vector(best, G), best_val

    def edge_vector(self, stump, G):
        """Per-class edges of one stump."""
        return stump_column(stump, self.X) @ G

    def all_edge_vectors(self, G):
        """Every candidate's per-class edge vector, stacked (n_candidates, k)."""
        return np.concatenate(
            [self.feature_edges(G, j).reshape(-1, G.shape[1])
             for j in range(self.X.shape[1])])

    def all_stumps(self):
        """Candidates in the same order as ``all_edge_vectors`` rows."""
        out = []
        for j, ts in enumerate(self.thresholds):
            for t in ts:
                out.append(DecisionStump(j, t, 1))
                out.append(DecisionStump(j, t, -1))
        return out


def best_stump(data, G):
    """One-shot pricing: ``(stump, class label (1-based), edge)``."""
    if data.m == 0:
        raise ValueError("empty dataset")
    stump, r, edge = StumpSearcher(data.features).search(G)
    return stump, r + 1, edge
