from dataclasses import dataclass, field

import numpy as np


class ConvergenceError(RuntimeError):
    """A master solver hit its iteration cap before meeting its tolerance."""

    def __init__(self, message, residuals=None, solution=None):
        super().__init__(message)
        self.residuals = residuals
        self.solution = solution


@dataclass
class MasterSolution:
    """Result of one restricted-master solve.

    ``state`` carries whatever the solver needs to warm-start the next solve
    (ADMM splitting variable and scaled multipliers, inner dual variables).
    """

    W: np.ndarray
    U: np.ndarray
    objective: float
    dual_objective: float = None
    iterations: int = 0
    residuals: tuple = None
    converged: bool = True
    state: dict = field(default_factory=dict)


def clamp_nonneg(W, tol=1e-12):
    W = np.array(W, dtype=float)
    if W.size and W.min() < -tol:
        raise ValueError(f"solver returned a weight of {W.min():.3g}")
    return np.maximum(W, 0.0)


def projected_gradient_residual(x, g):
    """Sup-norm of ``x - P(x - g)`` with ``P`` the projection onto ``x >= 0``."""
    if x.size == 0:
        return 0.0
    return float(np.abs(x - np.maximum(x - g, 0.0)).max())


def _cg(hessp, b, free, size, tol, max_iter):
    """Conjugate gradients on the free block of a PSD system ``H d = b``."""
    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rr = r @ r
    stop = tol * tol * rr
    for _ in range(max_iter):
        if rr <= stop:
            break
        full = np.zeros(size)
        full[free] = p
        Hp = hessp(full)[free]
        curv = p @ Hp
        if curv <= 1e-30 * (p @ p):
            # flat or numerically negative direction: keep what we have
            if not x.any():
                x = p
            break
        a = rr / curv
        x += a * p
        r -= a * Hp
        rr_new = r @ r
        p = r + (rr_new / rr) * p
        rr = rr_new
    return x


def minimize_nonneg(fun, x0, hessp, tol=1e-8, max_iter=500, cg_max_iter=250, damping=1.0):
    """Minimize a smooth convex ``fun(x) -> (f, g)`` over ``x >= 0``.

    Projected Newton-CG: variables at the bound with a positive gradient are
    held fixed, the free block takes a truncated Newton step, and a projected
    backtracking search enforces descent. ``hessp(x) -> (v -> H v)`` supplies
    Hessian-vector products. Stops when the projected gradient residual is at
    most ``tol``. Returns ``(x, f, residual, iterations)``.
    """
    x = np.maximum(np.asarray(x0, dtype=float).ravel(), 0.0)
    f, g = fun(x)
    res = projected_gradient_residual(x, g)
    it = 0
    while res > tol and it < max_iter:
        it += 1
        eps_act = min(res, 1e-3)
        active = (x <= eps_act) & (g > 0)
        d = -g.copy()
        hv0 = hessp(x)
        # Levenberg damping keeps CG finite along flat directions of the loss
        mu = damping * min(res, 1.0)
        hv = (lambda v: hv0(v) + mu * v) if mu > 0 else hv0
        for _ in range(5):
            free = np.flatnonzero(~active)
            if not free.size:
                break
            d[:] = -g
            d[free] = _cg(hv, -g[free], free, x.size, min(0.1, np.sqrt(res)), cg_max_iter)
            # pin variables at the bound that the step would push outside
            blocked = (x <= eps_act) & (d < 0) & ~active
            if not blocked.any():
                break
            active |= blocked
        t = 1.0
        accepted = False
        while t > 1e-20:
            x_new = np.maximum(x + t * d, 0.0)
            step = x_new - x
            if not step.any():
                break
            f_new, g_new = fun(x_new)
            decrease = -(g @ step)
            if f_new <= f - 1e-4 * max(decrease, 0.0):
                accepted = True
                break
            # within rounding of f, accept if the optimality residual improves
            if f_new <= f + 1e-14 * max(1.0, abs(f)):
                if projected_gradient_residual(x_new, g_new) < res:
                    accepted = True
                    break
            t *= 0.5
        if not accepted:
            # fall back to a projected gradient step with backtracking
            t = 1.0
            while t > 1e-20:
                x_new = np.maximum(x - t * g, 0.0)
                f_new, g_new = fun(x_new)
                if f_new < f:
                    accepted = True
                    break
                t *= 0.5
            if not accepted:
                break
        x, f, g = x_new, f_new, g_new
        res = projected_gradient_residual(x, g)
    return x, f, res, it
