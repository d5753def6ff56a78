"""Restricted-master solvers."""

from .admm import (consensus_admm_solve, fast_per_class_wstep, logistic_wstep,
                   solve_group_hinge_admm, solve_group_logistic_admm)
from .common import ConvergenceError, MasterSolution, minimize_nonneg
from .exp import solve_l1_exp
from .lp import solve_l1_hinge_lp
from .simplex import LPError, simplex

__all__ = [
    "ConvergenceError",
    "LPError",
    "MasterSolution",
    "consensus_admm_solve",
    "fast_per_class_wstep",
    "logistic_wstep",
    "minimize_nonneg",
    "simplex",
    "solve_group_hinge_admm",
    "solve_group_logistic_admm",
    "solve_l1_exp",
    "solve_l1_hinge_lp",
]
