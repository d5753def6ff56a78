"""Prox of the multi-class hinge loss by dual coordinate ascent.

Solves ``min_W  sum_i n_i max_r (c_ir + H_i w_r - H_i w_{y_i}) + lam/2 ||W - A||^2``
with ``c_ir = 1 - [r == y_i]``. Writing each max as a maximum over the simplex
gives the concave dual

    max_{alpha_i in simplex}  <c, alpha> + <B, A> - ||B||^2 / (2 lam),
    B = H^T diag(n) (alpha - onehot(y)),   W = A - B / lam,

where ``<c, alpha>`` is weighted by the row counts ``n_i`` too. Each block
``alpha_i`` is a simplex-constrained quadratic with Hessian
``-(n_i^2 ||H_i||^2 / lam) I``, maximized exactly by one simplex projection. The
optimal ``alpha`` rows are the boosting dual weights.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _project_simplex_into(v, out, work):
    """Euclidean projection of ``v`` onto the unit simplex, written to ``out``."""
    k = v.shape[0]
    for j in range(k):
        work[j] = v[j]
    # insertion sort, descending; k is small
    for a in range(1, k):
        x = work[a]
        b = a - 1
        while b >= 0 and work[b] < x:
            work[b + 1] = work[b]
            b -= 1
        work[b + 1] = x
    css = 0.0
    theta = 0.0
    for j in range(k):
        css += work[j]
        t = (css - 1.0) / (j + 1)
        if work[j] - t > 0:
            theta = t
    for j in range(k):
        out[j] = max(v[j] - theta, 0.0)


@njit(cache=True)
def project_simplex(v):
    out = np.empty(v.shape[0])
    _project_simplex_into(v, out, np.empty(v.shape[0]))
    return out


@njit(cache=True)
def _gap(H, labels0, cnt, At, lam, alpha, Bt, Wt):
    m, n = H.shape
    k = At.shape[0]
    primal = 0.0
    lin = 0.0
    for i in range(m):
        yi = labels0[i]
        syi = 0.0
        for j in range(n):
            syi += H[i, j] * Wt[yi, j]
        best = 0.0
        a = 0.0
        for r in range(k):
            if r != yi:
                s = 0.0
                for j in range(n):
                    s += H[i, j] * Wt[r, j]
                v = 1.0 + s - syi
                if v > best:
                    best = v
                a += alpha[i, r]
        primal += cnt[i] * best
        lin += cnt[i] * a
    quad = 0.0
    cross = 0.0
    for r in range(k):
        for j in range(n):
            quad += Bt[r, j] * Bt[r, j]
            cross += Bt[r, j] * At[r, j]
    primal += quad / (2.0 * lam)
    dual = lin + cross - quad / (2.0 * lam)
    return primal, dual


@njit(cache=True)
def _prox_hinge_cd(H, labels0, cnt, At, lam, alpha, tol, max_passes, check_every):
    m, n = H.shape
    k = At.shape[0]
    Bt = np.zeros((k, n))
    for i in range(m):
        yi = labels0[i]
        for r in range(k):
            d = cnt[i] * (alpha[i, r] - (1.0 if r == yi else 0.0))
            if d != 0.0:
                for j in range(n):
                    Bt[r, j] += H[i, j] * d
    Wt = At - Bt / lam
    hn = np.empty(m)
    for i in range(m):
        acc = 0.0
        for j in range(n):
            acc += H[i, j] * H[i, j]
        hn[i] = acc
    primal, dual = _gap(H, labels0, cnt, At, lam, alpha, Bt, Wt)
    passes = 0
    v = np.empty(k)
    new = np.empty(k)
    work = np.empty(k)
    while passes < max_passes and primal - dual > tol * (1.0 + abs(primal)):
        for i in range(m):
            if hn[i] == 0.0:
                continue
            yi = labels0[i]
            step = lam / (cnt[i] * hn[i])
            for r in range(k):
                s = 0.0
                for j in range(n):
                    s += H[i, j] * Wt[r, j]
                v[r] = alpha[i, r] + step * (s + (0.0 if r == yi else 1.0))
            _project_simplex_into(v, new, work)
            for r in range(k):
                d = new[r] - alpha[i, r]
                if d != 0.0:
                    d *= cnt[i]
                    c = d / lam
                    for j in range(n):
                        Bt[r, j] += H[i, j] * d
                        Wt[r, j] -= H[i, j] * c
                    alpha[i, r] = new[r]
        passes += 1
        if passes % check_every == 0 or passes == max_passes:
            primal, dual = _gap(H, labels0, cnt, At, lam, alpha, Bt, Wt)
    return Wt, primal, dual, passes


def prox_hinge_cd(H, labels0, A, lam, alpha, tol, max_passes, counts=None, check_every=4):
    """Run cyclic block ascent in place on ``alpha``.

    ``counts`` weights each row's hinge term, so identical examples can be
    merged into one row (its dual row is then shared by all of them).
    Returns ``(W, primal, dual, passes)``; the duality gap ``primal - dual``
    certifies the W-step accuracy. The gap is evaluated every
    ``check_every`` passes.
    """
    H = np.ascontiguousarray(H, dtype=float)
    labels0 = np.ascontiguousarray(labels0, dtype=np.int64)
    cnt = np.ones(H.shape[0]) if counts is None else np.ascontiguousarray(counts, dtype=float)
    At = np.ascontiguousarray(np.asarray(A, dtype=float).T)
    Wt, primal, dual, passes = _prox_hinge_cd(H, labels0, cnt, At, float(lam), alpha,
                                              float(tol), int(max_passes), int(check_every))
    return np.ascontiguousarray(Wt.T), primal, dual, passes
