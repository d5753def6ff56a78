import numpy as np

from ..losses import LossKind, hessian_vector_product, value_and_grad
from ..model import MarginMode
from .common import (ConvergenceError, MasterSolution, clamp_nonneg,
                     minimize_nonneg, projected_gradient_residual)


def solve_l1_exp(H, labels0, nu, warm_start=None, tol=1e-7, max_iter=5000):
    """Exponential loss (log-sum-exp form) plus ``nu * ||W||_1`` over ``W >= 0``.

    Solved in the primal by projected Newton-CG; the dual weights are
    the normalized ``exp(-rho)`` at the solution.
    """
    H = np.asarray(H, dtype=float)
    labels0 = np.asarray(labels0)
    m, n = H.shape
    k = int(labels0.max()) + 1 if warm_start is None else warm_start.shape[1]
    if warm_start is None:
        warm_start = np.zeros((n, k))
    shape = warm_start.shape

    def fun(x):
        W = x.reshape(shape)
        f, g, _ = value_and_grad(LossKind.EXPONENTIAL, W, H, labels0, MarginMode.PAIRWISE)
        return f + nu * x.sum(), (g + nu).ravel()

    def hessp(x):
        hv = hessian_vector_product(LossKind.EXPONENTIAL, x.reshape(shape), H, labels0)
        return lambda v: hv(v.reshape(shape)).ravel()

    x, f, res, evals = minimize_nonneg(fun, warm_start, hessp=hessp, tol=tol,
                                       max_iter=max_iter)
    W = clamp_nonneg(x.reshape(shape))
    f, g, U = value_and_grad(LossKind.EXPONENTIAL, W, H, labels0, MarginMode.PAIRWISE)
    objective = f + nu * W.sum()
    res = projected_gradient_residual(W, g + nu)
    sol = MasterSolution(W=W, U=U, objective=float(objective), iterations=evals,
                         residuals=(res, 0.0), converged=res <= tol)
    if res > tol:
        raise ConvergenceError(
            f"exp master: projected-gradient residual {res:.3g} > {tol:g}",
            residuals=(res, 0.0), solution=sol)
    return sol
