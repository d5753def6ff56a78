"""Dense two-phase revised simplex with Bland's anti-cycling rule.

Solves ``min c^T x  s.t.  A x = b, x >= 0``. Intended for the small master
problems used in tests and for cross-checking the sparse backend; the basis
inverse is kept dense and updated by elementary row operations.
"""

from dataclasses import dataclass

import numpy as np


class LPError(RuntimeError):
    """Infeasible, unbounded, or numerically broken linear program."""


@dataclass
class SimplexResult:
    x: np.ndarray
    y: np.ndarray        # equality-row duals, c_B^T B^{-1}
    objective: float
    iterations: int
    basis: np.ndarray


def _pivot(Binv, basis, d, row, col):
    piv = d[row]
    Binv[row] /= piv
    for i in np.flatnonzero(d):
        if i != row:
            Binv[i] -= d[i] * Binv[row]
    basis[row] = col


def _iterate(A, b, c, Binv, basis, allowed, tol, max_iter, it0):
    """Bland-rule primal simplex from a feasible basis. Returns iterations used."""
    m = A.shape[0]
    it = it0
    while True:
        if it >= max_iter:
            raise LPError(f"simplex iteration limit {max_iter} reached")
        y = c[basis] @ Binv
        red = c - y @ A
        red[basis] = 0.0
        cand = np.flatnonzero((red < -tol) & allowed)
        if cand.size == 0:
            return it
        col = cand[0]
        d = Binv @ A[:, col]
        xb = Binv @ b
        pos = d > tol
        if not pos.any():
            raise LPError("linear program is unbounded")
        ratios = np.full(m, np.inf)
        ratios[pos] = xb[pos] / d[pos]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + tol * max(1.0, abs(best)))
        row = ties[np.argmin(basis[ties])]
        _pivot(Binv, basis, d, row, col)
        it += 1


def simplex(c, A, b, tol=1e-10, max_iter=50_000):
    c = np.asarray(c, dtype=float)
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    m, n = A.shape
    flip = b < 0
    A[flip] *= -1
    b[flip] *= -1

    # phase 1: artificials n..n+m-1 form the starting basis
    A1 = np.hstack([A, np.eye(m)])
    c1 = np.concatenate([np.zeros(n), np.ones(m)])
    basis = np.arange(n, n + m)
    Binv = np.eye(m)
    allowed = np.ones(n + m, dtype=bool)
    it = _iterate(A1, b, c1, Binv, basis, allowed, tol, max_iter, 0)
    xb = Binv @ b
    infeas = c1[basis] @ xb
    if infeas > 1e-8 * max(1.0, np.abs(b).max()):
        raise LPError(f"linear program is infeasible (phase-1 value {infeas:.3g})")

    # drive zero-level artificials out of the basis where possible
    for row in np.flatnonzero(basis >= n):
        alpha = Binv[row] @ A
        j = np.flatnonzero(np.abs(alpha) > 1e-9)
        j = j[~np.isin(j, basis)]
        if j.size:
            _pivot(Binv, basis, Binv @ A1[:, j[0]], row, j[0])
        # otherwise the row is redundant and its artificial stays at zero

    c2 = np.concatenate([c, np.zeros(m)])
    allowed[n:] = False
    it = _iterate(A1, b, c2, Binv, basis, allowed, tol, max_iter, it)

    xb = Binv @ b
    x = np.zeros(n + m)
    x[basis] = xb
    y = c2[basis] @ Binv
    y[flip] *= -1
    return SimplexResult(x=x[:n], y=y, objective=float(c @ x[:n]),
                         iterations=it, basis=basis.copy())
