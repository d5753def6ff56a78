"""ADMM masters for mixed-norm regularized boosting.

All solvers split ``f(W) + nu * Omega(Z) + indicator(Z >= 0)`` with ``W = Z``
and use scaled multipliers ``Ut`` (the unscaled multiplier divided by
``lam``)::

    W_q <- argmin f_q(W) + lam/2 ||W - Z + Ut_q||^2            (each block q)
    Z   <- prox_rows(mean_q(W_q + Ut_q), nu / (lam * q_max))  (row-wise)
    Ut_q <- Ut_q + W_q - Z

A single data block is the ordinary two-block ADMM. Iteration stops when
``sqrt(sum_q ||W_q - Z||^2)`` and ``lam * sqrt(q_max) * ||Z - Z_prev||`` are
both at most ``tol * sqrt(n k)``. The returned weights are the iterate
``Z`` with the lowest objective seen, the warm start included, so a warm
started solve never ends above where it began.
"""

import numpy as np

from ..losses import (LossKind, dual_weights_from_margins, hessian_vector_product,
                      hinge_terms, value_and_grad)
from ..model import MarginMode, scores_to_margins, sign_matrix
from ..regularizers import RegKind, norm_value, prox_rows
from .common import ConvergenceError, MasterSolution, clamp_nonneg, minimize_nonneg
from .prox_hinge import prox_hinge_cd

DEFAULT_LAMBDA = 1.0
DEFAULT_MAX_ITER = 500
DEFAULT_TOL = 1e-6
DEFAULT_INNER_TOL = 1e-8
ADAPT_RATIO = 10.0
ADAPT_FACTOR = 2.0
INNER_FACTOR = 0.1


def _pad_rows(X, n):
    X = np.asarray(X, dtype=float)
    if X.shape[0] == n:
        return X.copy()
    out = np.zeros((n, X.shape[1]))
    out[: X.shape[0]] = X
    return out


def _logistic_objective(H, labels0, mode, reg, nu, Z):
    rho = scores_to_margins(H @ Z, labels0, mode)
    R = rho.values
    return float(np.logaddexp(0.0, -R).sum() / R.size + nu * norm_value(reg, Z))


def _hinge_objective(H, labels0, reg, nu, Z):
    rho = scores_to_margins(H @ Z, labels0).values
    return float(hinge_terms(rho, labels0).sum() + nu * norm_value(reg, Z))


def logistic_wstep(H, labels0, A, lam, W0, mode=MarginMode.PAIRWISE, scale=None,
                   tol=DEFAULT_INNER_TOL, max_iter=500):
    """``argmin_{W >= 0} logistic(W) + lam/2 ||W - A||^2`` solved jointly."""
    shape = A.shape

    def fun(x):
        W = x.reshape(shape)
        f, g, _ = value_and_grad(LossKind.LOGISTIC, W, H, labels0, mode, scale=scale)
        D = W - A
        return f + 0.5 * lam * np.sum(D * D), (g + lam * D).ravel()

    def hessp(x):
        hv = hessian_vector_product(LossKind.LOGISTIC, x.reshape(shape), H, labels0,
                                    mode, scale=scale)
        return lambda v: hv(v.reshape(shape)).ravel() + lam * v

    x, _, res, _ = minimize_nonneg(fun, W0, hessp=hessp, tol=tol, max_iter=max_iter)
    return x.reshape(shape), res


def fast_per_class_wstep(H, Y_signs, Z, Ut, lam, r, scale=None, w0=None,
                         tol=DEFAULT_INNER_TOL, max_iter=500, mode=MarginMode.FAST):
    """Class-``r`` slice of the FAST logistic W-step.

    Minimizes ``scale * sum_i log(1 + exp(-y_ir H_i w)) + lam/2 ||w - z_r + ut_r||^2``
    over ``w >= 0``; ``Ut`` holds scaled multipliers. ``scale`` defaults to
    ``1/(mk)``. The k slices together solve the joint FAST W-step.
    """
    if MarginMode(mode) is not MarginMode.FAST:
        raise ValueError("per-class W-steps exist only for FAST margins")
    H = np.asarray(H, dtype=float)
    m, k = Y_signs.shape
    scale = 1.0 / (m * k) if scale is None else scale
    y = Y_signs[:, r]
    a = Z[:, r] - Ut[:, r]
    w0 = a if w0 is None else w0

    def fun(w):
        t = y * (H @ w)
        p = 0.5 * (1.0 - np.tanh(0.5 * t))     # sigmoid(-t), overflow free
        f = scale * np.logaddexp(0.0, -t).sum()
        d = w - a
        g = -scale * (H.T @ (y * p)) + lam * d
        return f + 0.5 * lam * (d @ d), g

    def hessp(w):
        t = y * (H @ w)
        p = 0.5 * (1.0 - np.tanh(0.5 * t))
        curv = scale * p * (1.0 - p)
        return lambda v: H.T @ (curv * (H @ v)) + lam * v

    w, _, res, _ = minimize_nonneg(fun, w0, hessp=hessp, tol=tol, max_iter=max_iter)
    return w


def _fast_wstep(H, labels0, A, lam, W0, scale, tol, executor=None):
    k = A.shape[1]
    Y = sign_matrix(labels0, k)
    zero = np.zeros_like(A)

    def one(r):
        return fast_per_class_wstep(H, Y, A, zero, lam, r, scale=scale,
                                    w0=W0[:, r], tol=tol)

    cols = list(executor.map(one, range(k))) if executor else [one(r) for r in range(k)]
    return np.column_stack(cols) if cols else A.copy()


def _run_admm(wstep, objective, Z0, Ut0, reg, nu, lam, tol, max_iter, snapshot=None,
              adapt=False, monitor=None):
    """Shared ADMM loop over ``len(Ut0)`` blocks.

    With ``adapt`` the penalty follows residual balancing: ``lam`` doubles
    when the primal residual exceeds ten times the dual one and halves in the
    opposite case, rescaling the scaled multipliers to match. Adaptation is
    frozen for the second half of the iteration budget. ``monitor``, when
    given, is a dict kept up to date with the latest residuals.
    """
    q = len(Ut0)
    Z = Z0.copy()
    Ut = [u.copy() for u in Ut0]
    Ws = [Z.copy() for _ in range(q)]
    n, k = Z.shape
    thresh = tol * np.sqrt(max(n * k, 1))
    best_Z, best_obj = Z.copy(), objective(Z)
    best_snap = snapshot() if snapshot else None
    r_norm = s_norm = np.inf
    it = 0
    while it < max_iter:
        it += 1
        Ws = [wstep(b, Z - Ut[b], Ws[b], lam) for b in range(q)]
        Z_prev = Z
        V = sum(W + U for W, U in zip(Ws, Ut)) / q
        Z = prox_rows(reg, V, nu / (lam * q), nonneg=True)
        for b in range(q):
            Ut[b] += Ws[b] - Z
        r_norm = np.sqrt(sum(np.sum((W - Z) ** 2) for W in Ws))
        s_norm = lam * np.sqrt(q) * np.linalg.norm(Z - Z_prev)
        if monitor is not None:
            monitor.update(r=r_norm, s=s_norm, lam=lam)
        obj = objective(Z)
        if obj <= best_obj:
            best_Z, best_obj = Z.copy(), obj
            best_snap = snapshot() if snapshot else None
        if r_norm <= thresh and s_norm <= thresh:
            break
        if adapt and 2 * it < max_iter:
            if r_norm > ADAPT_RATIO * s_norm:
                lam *= ADAPT_FACTOR
                Ut = [u / ADAPT_FACTOR for u in Ut]
            elif s_norm > ADAPT_RATIO * r_norm:
                lam /= ADAPT_FACTOR
                Ut = [u * ADAPT_FACTOR for u in Ut]
    converged = r_norm <= thresh and s_norm <= thresh
    # warm starts resume from the best iterate so the next master starts no worse
    state = {"Z": best_Z, "Ut": Ut, "Ws": Ws, "lam": lam}
    return best_Z, best_obj, best_snap, it, (float(r_norm), float(s_norm)), converged, state


def _finish(sol, strict, what):
    if strict and not sol.converged:
        raise ConvergenceError(
            f"{what}: ADMM stopped after {sol.iterations} iterations with "
            f"residuals {sol.residuals[0]:.3g}, {sol.residuals[1]:.3g}",
            residuals=sol.residuals, solution=sol)
    return sol


def _check(lam, reg):
    if lam <= 0:
        raise ValueError("the ADMM penalty lam must be positive")
    return RegKind(reg)


def consensus_admm_solve(blocks, nu, reg=RegKind.L12, lam=DEFAULT_LAMBDA,
                         loss=LossKind.LOGISTIC, mode=MarginMode.PAIRWISE,
                         warm_start=None, k=None, tol=DEFAULT_TOL,
                         max_iter=DEFAULT_MAX_ITER, inner_tol=DEFAULT_INNER_TOL,
                         strict=True, executor=None, adapt=False):
    """Logistic master split over data blocks ``[(H_q, labels0_q), ...]``.

    Each block's loss keeps the global ``1/(mk)`` normalization, so the block
    losses sum to the single-block objective and every ``q_max`` shares its
    minimizer. ``warm_start`` is a dict with ``Z`` and, optionally, the list
    ``Ut`` of scaled multipliers (rows are zero-padded to the current ``n``).
    With ``adapt`` the penalty is balanced against the residuals, starting
    from the warm start's final ``lam`` when it has one.
    """
    reg = _check(lam, reg)
    if LossKind(loss) is not LossKind.LOGISTIC:
        raise ValueError("consensus ADMM is implemented for the logistic loss")
    mode = MarginMode(mode)
    if not blocks:
        raise ValueError("need at least one data block")
    blocks = [(np.asarray(H, dtype=float), np.asarray(y)) for H, y in blocks]
    if any(H.shape[0] == 0 for H, _ in blocks):
        raise ValueError("empty data block")
    n = blocks[0][0].shape[1]
    m = sum(H.shape[0] for H, _ in blocks)
    if k is None:
        k = int(max(y.max() for _, y in blocks)) + 1
    scale = 1.0 / (m * k)
    q = len(blocks)

    ws = warm_start or {}
    Z0 = _pad_rows(ws["Z"], n) if "Z" in ws else np.zeros((n, k))
    Ut0 = ws.get("Ut")
    if Ut0 is None or len(Ut0) != q:
        Ut0 = [np.zeros((n, k)) for _ in range(q)]
    else:
        Ut0 = [_pad_rows(u, n) for u in Ut0]

    if adapt and "lam" in ws:
        lam = ws["lam"]

    def wstep(b, A, W0, lam):
        H, y = blocks[b]
        if mode is MarginMode.FAST:
            return _fast_wstep(H, y, A, lam, W0, scale, inner_tol, executor)
        W, _ = logistic_wstep(H, y, A, lam, W0, mode, scale=scale, tol=inner_tol)
        return W

    H_all = np.vstack([H for H, _ in blocks])
    y_all = np.concatenate([y for _, y in blocks])

    def objective(Z):
        return _logistic_objective(H_all, y_all, mode, reg, nu, Z)

    Z, obj, _, it, resid, conv, state = _run_admm(
        wstep, objective, Z0, Ut0, reg, nu, lam, tol, max_iter, adapt=adapt)
    Z = clamp_nonneg(Z)
    U = dual_weights_from_margins(LossKind.LOGISTIC, scores_to_margins(H_all @ Z, y_all, mode))
    sol = MasterSolution(W=Z, U=U, objective=obj, iterations=it, residuals=resid,
                         converged=conv, state=state)
    return _finish(sol, strict, "logistic master")


def solve_group_logistic_admm(H, labels0, nu, reg=RegKind.L12, lam=DEFAULT_LAMBDA,
                              mode=MarginMode.PAIRWISE, warm_start=None, k=None,
                              **kwargs):
    """Single-block logistic master; the one-block case of the consensus solver."""
    return consensus_admm_solve([(H, labels0)], nu, reg=reg, lam=lam, mode=mode,
                                warm_start=warm_start, k=k, **kwargs)


def _merge_rows(H, labels0):
    """Group identical ``(H_i, y_i)`` rows: ``(H_u, y_u, counts, inverse)``."""
    key = np.column_stack([H, labels0])
    uniq, inverse, counts = np.unique(key, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.ravel()
    return (np.ascontiguousarray(uniq[:, :-1]), uniq[:, -1].astype(np.int64),
            counts.astype(float), inverse)


def solve_group_hinge_admm(H, labels0, nu, reg=RegKind.L12, lam=DEFAULT_LAMBDA,
                           warm_start=None, k=None, tol=DEFAULT_TOL,
                           max_iter=DEFAULT_MAX_ITER, inner_tol=DEFAULT_INNER_TOL,
                           inner_max_passes=2000, strict=True, adapt=False):
    """Hinge master with a row-norm regularizer, by ADMM.

    The W-step is the prox of the (unnormalized) multi-class hinge loss,
    solved exactly in its dual; those dual variables are row-stochastic and
    are returned as the boosting weights ``U``. Examples with identical
    stump responses and label share one weighted dual row.
    """
    reg = _check(lam, reg)
    H = np.ascontiguousarray(H, dtype=float)
    labels0 = np.ascontiguousarray(labels0, dtype=np.int64)
    m, n = H.shape
    k = int(labels0.max()) + 1 if k is None else k
    Hu, yu, counts, inverse = _merge_rows(H, labels0)
    g = len(counts)
    ws = warm_start or {}
    Z0 = _pad_rows(ws["Z"], n) if "Z" in ws else np.zeros((n, k))
    Ut0 = ws.get("Ut")
    Ut0 = [_pad_rows(Ut0[0], n)] if Ut0 is not None and len(Ut0) == 1 else [np.zeros((n, k))]
    alpha = np.full((g, k), 1.0 / k)
    prev = ws.get("alpha")
    if prev is not None and len(prev) == m:
        # average the previous per-example rows over each group
        alpha = np.zeros((g, k))
        np.add.at(alpha, inverse, prev)
        alpha /= counts[:, None]
    if adapt and "lam" in ws:
        lam = ws["lam"]
    inner = {"passes": 0, "gap": 0.0, "primal": 0.0}
    monitor = {"r": np.inf, "s": np.inf}

    def wstep(b, A, W0, lam):
        # The prox objective is lam-strongly convex, so a gap below
        # lam/2 * e^2 keeps the W-step within e of exact. Track e to a
        # tenth of the current residuals: loose early, exact near the end.
        e = INNER_FACTOR * min(monitor["r"], monitor["s"] / lam)
        gap_tol = 0.5 * lam * e * e / (1.0 + abs(inner["primal"]))
        W, primal, dual, passes = prox_hinge_cd(Hu, yu, A, lam, alpha,
                                                max(inner_tol, gap_tol),
                                                inner_max_passes, counts=counts)
        inner["passes"] += passes
        inner["gap"] = primal - dual
        inner["primal"] = primal
        return W

    def objective(Z):
        return _hinge_objective(H, labels0, reg, nu, Z)

    Z, obj, snap, it, resid, conv, state = _run_admm(
        wstep, objective, Z0, Ut0, reg, nu, lam, tol, max_iter,
        snapshot=lambda: alpha.copy(), adapt=adapt, monitor=monitor)
    U = np.maximum(snap[inverse], 0.0)
    U /= U.sum(axis=1, keepdims=True)
    state["alpha"] = alpha[inverse]
    state["inner_passes"] = inner["passes"]
    state["groups"] = g
    sol = MasterSolution(W=clamp_nonneg(Z), U=U, objective=obj, iterations=it,
                         residuals=resid, converged=conv, state=state)
    return _finish(sol, strict, "hinge master")
