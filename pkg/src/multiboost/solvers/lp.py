"""Hinge-loss, l1-regularized restricted master as a linear program.

Primal over ``x = [vec(W), xi]`` (W row-major, both non-negative)::

    min  sum_i xi_i + nu * sum W
    s.t. H_i w_{y_i} - H_i w_r + xi_i >= 1      for all i and r != y_i

The ``r == y_i`` rows reduce to ``xi_i >= 0`` and are carried by the bound.
With ``y`` the (non-negative) row duals, the boosting weights are
``U_ir = y_ir`` for ``r != y_i`` and ``U_{i,y_i} = 1 - sum_{r != y_i} y_ir``,
so every row of U sums to one. The dual objective is
``sum_i (1 - U_{i,y_i})``.
"""

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from ..losses import hinge_terms
from ..model import scores_to_margins
from .common import MasterSolution, clamp_nonneg
from .simplex import LPError, simplex


def _constraint_matrix(H, labels0, k, dense):
    m, n = H.shape
    mask = np.ones((m, k), dtype=bool)
    mask[np.arange(m), labels0] = False
    ii, rr = np.nonzero(mask)          # row-major: example outer, class inner
    R = ii.size
    j = np.arange(n)
    rows = np.repeat(np.arange(R), 2 * n + 1)
    cols = np.hstack([j[None, :] * k + labels0[ii][:, None],
                      j[None, :] * k + rr[:, None],
                      (n * k + ii)[:, None]]).ravel()
    vals = np.hstack([H[ii], -H[ii], np.ones((R, 1))]).ravel()
    A = sparse.csr_matrix((vals, (rows, cols)), shape=(R, n * k + m))
    return A.toarray() if dense else A


def _dual_weights(y, labels0, k):
    m = len(labels0)
    U = np.zeros((m, k))
    mask = np.ones((m, k), dtype=bool)
    mask[np.arange(m), labels0] = False
    U[mask] = y
    U[np.arange(m), labels0] = 1.0 - U.sum(axis=1)
    return U


def solve_l1_hinge_lp(H, labels0, nu, k=None, backend="highs", tol=1e-10):
    """Solve the hinge/l1 master exactly.

    ``backend`` is ``"highs"`` (sparse dual simplex from scipy) or
    ``"dense"`` (the in-repo revised simplex, for small instances).
    """
    H = np.asarray(H, dtype=float)
    labels0 = np.asarray(labels0)
    m, n = H.shape
    k = int(labels0.max()) + 1 if k is None else k
    if nu <= 0:
        raise ValueError("nu must be positive")
    c = np.concatenate([np.full(n * k, float(nu)), np.ones(m)])
    A = _constraint_matrix(H, labels0, k, dense=(backend == "dense"))
    b = np.ones(A.shape[0])

    if backend == "dense":
        # surplus columns turn A x >= b into equalities
        Aeq = np.hstack([A, -np.eye(A.shape[0])])
        ceq = np.concatenate([c, np.zeros(A.shape[0])])
        res = simplex(ceq, Aeq, b, tol=tol)
        x = res.x[: n * k + m]
        y = res.y
        iterations = res.iterations
    elif backend == "highs":
        res = linprog(c, A_ub=-A, b_ub=-b, bounds=(0, None), method="highs-ds",
                      options={"primal_feasibility_tolerance": tol,
                               "dual_feasibility_tolerance": tol})
        if res.status != 0:
            raise LPError(f"LP solve failed: {res.message}")
        x = res.x
        y = -res.ineqlin.marginals
        iterations = int(res.nit)
    else:
        raise ValueError(f"unknown LP backend {backend!r}")

    y = np.maximum(y, 0.0)
    W = clamp_nonneg(x[: n * k].reshape(n, k), tol=1e-9)
    U = _dual_weights(y, labels0, k)
    U = np.maximum(U, 0.0)
    # objective at the returned point, with slacks recomputed from W
    xi = hinge_terms(scores_to_margins(H @ W, labels0).values, labels0)
    objective = float(xi.sum() + nu * W.sum())
    dual_objective = float(np.sum(1.0 - U[np.arange(m), labels0]))
    return MasterSolution(W=W, U=U, objective=objective,
                          dual_objective=dual_objective, iterations=iterations,
                          state={"slacks": xi})
