"""Fully-corrective multi-class boosting by column generation.

Each round prices the stump family against the current dual weights, stops
when the best candidate no longer violates dual feasibility by more than
``eps``, and otherwise admits the stump and re-solves the restricted master
over every admitted column.
"""

import logging
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .losses import LossKind, dual_weights_from_margins, loss_value
from .model import EnsembleModel, MarginMode, margins, scores_to_margins
from .regularizers import RegKind, norm_value, stopping_margin, stopping_margins
from .solvers import (ConvergenceError, consensus_admm_solve, solve_group_hinge_admm,
                      solve_l1_exp, solve_l1_hinge_lp)
from .weak_learner import EdgeKind, StumpSearcher, edge_weights, stump_column

log = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    loss: LossKind = LossKind.HINGE
    reg: RegKind = RegKind.L1
    nu: float = 1e-2
    T: int = 100
    eps: float = 1e-4
    mode: MarginMode = MarginMode.PAIRWISE
    admm_lambda: float = 1.0
    # balance the ADMM penalty against the residuals (starting at admm_lambda)
    admm_adapt: bool = True
    admm_max_iter: int = 500
    admm_tol: float = 1e-6
    inner_tol: float = 1e-8
    # cap on dual coordinate passes per hinge W-step; the inner solve stops
    # earlier once its gap is small next to the ADMM residuals
    hinge_inner_passes: int = 20
    exp_tol: float = 1e-7
    exp_max_iter: int = 5000
    lp_backend: str = "highs"
    blocks: int = 1
    seed: int = 0
    # raise on an ADMM iteration cap instead of keeping the best iterate
    strict: bool = False

    def __post_init__(self):
        self.loss = LossKind(self.loss)
        self.reg = RegKind(self.reg)
        self.mode = MarginMode(self.mode)
        if self.T < 1:
            raise ValueError("T must be at least 1")
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.nu <= 0:
            raise ValueError("nu must be positive")
        if self.admm_lambda <= 0:
            raise ValueError("admm_lambda must be positive")
        if self.hinge_inner_passes < 1:
            raise ValueError("hinge_inner_passes must be at least 1")
        if self.blocks < 1:
            raise ValueError("blocks must be at least 1")
        if self.mode is MarginMode.FAST and self.loss is not LossKind.LOGISTIC:
            raise ValueError("FAST margins are defined for the logistic loss only")
        if self.loss is LossKind.EXPONENTIAL and self.reg is not RegKind.L1:
            raise ValueError("the exponential loss is paired with l1 only")
        if self.blocks > 1 and self.loss is not LossKind.LOGISTIC:
            raise ValueError("distributed training needs the logistic loss")

    def to_dict(self):
        d = asdict(self)
        for key in ("loss", "reg", "mode"):
            d[key] = d[key].value
        return d


@dataclass
class TraceRecord:
    iteration: int
    feature: int
    threshold: float
    polarity: int
    cls: int              # 1-based class that priced the stump
    edge: float
    stop_margin: float
    objective: float      # master objective after admitting the stump
    train_error: float
    test_error: float = float("nan")


@dataclass
class TrainTrace:
    records: list = field(default_factory=list)
    stop_reason: str = "max_iter"
    final_stop_margin: float = float("nan")
    final_dual_weights: np.ndarray = None

    @property
    def objectives(self):
        return np.array([r.objective for r in self.records])

    def __len__(self):
        return len(self.records)


def initial_dual_weights(loss, m, k):
    """Dual weights of the empty ensemble.

    Hinge rows start uniform at ``1/k``; the exponential weights are
    ``1/(mk)``; the logistic weights are the KKT map at zero margins,
    ``1/(2mk)``.
    """
    if loss is LossKind.HINGE:
        return np.full((m, k), 1.0 / k)
    if loss is LossKind.EXPONENTIAL:
        return np.full((m, k), 1.0 / (m * k))
    return np.full((m, k), 0.5 / (m * k))


def edge_kind(config):
    if config.mode is MarginMode.FAST:
        return EdgeKind.FAST
    return EdgeKind.HINGE if config.loss is LossKind.HINGE else EdgeKind.GRADIENT


def objective(model, data, loss, reg, nu, mode=MarginMode.PAIRWISE):
    """Primal objective ``loss(rho) + nu * Omega(W)`` of a model on data."""
    rho = margins(model, data, mode)
    return loss_value(loss, rho) + nu * norm_value(reg, model.weights)


def error_rate(model, data):
    if data is None or data.m == 0:
        return float("nan")
    if model.n == 0:
        pred = np.ones(data.m, dtype=int)
    else:
        pred = model.predict(data.features)
    return float(np.mean(pred != data.labels))


def _blocks(m, q, seed):
    """Deterministic, seed-shuffled partition of ``range(m)`` into ``q`` blocks."""
    perm = np.random.Generator(np.random.PCG64(seed)).permutation(m)
    return [np.sort(b) for b in np.array_split(perm, q)]


class _Master:
    """Dispatches restricted-master solves and carries warm-start state."""

    def __init__(self, data, config):
        self.data = data
        self.config = config
        self.y0 = data.y0
        self.k = data.k
        self.state = {}
        self.W = np.zeros((0, data.k))
        self.block_idx = _blocks(data.m, config.blocks, config.seed) \
            if config.blocks > 1 else None

    def solve(self, H, tighten=1.0):
        c = self.config
        if c.loss is LossKind.HINGE and c.reg is RegKind.L1:
            return solve_l1_hinge_lp(H, self.y0, c.nu, k=self.k, backend=c.lp_backend)
        if c.loss is LossKind.EXPONENTIAL:
            W0 = np.zeros((H.shape[1], self.k))
            W0[: self.W.shape[0]] = self.W
            return solve_l1_exp(H, self.y0, c.nu, warm_start=W0,
                                tol=c.exp_tol * tighten, max_iter=c.exp_max_iter)
        admm = dict(lam=c.admm_lambda, tol=c.admm_tol * tighten,
                    max_iter=c.admm_max_iter, inner_tol=c.inner_tol * tighten,
                    strict=c.strict, k=self.k, warm_start=self.state,
                    adapt=c.admm_adapt)
        if c.loss is LossKind.HINGE:
            return solve_group_hinge_admm(H, self.y0, c.nu, reg=c.reg,
                                          inner_max_passes=c.hinge_inner_passes, **admm)
        if self.block_idx is None:
            blocks = [(H, self.y0)]
        else:
            blocks = [(H[b], self.y0[b]) for b in self.block_idx]
        return consensus_admm_solve(blocks, c.nu, reg=c.reg, mode=c.mode, **admm)

    def update(self, sol):
        self.W = sol.W
        self.state = sol.state


def _dual_weights(config, sol, H, y0):
    """Boosting weights from a master solution.

    Hinge masters report them directly; smooth losses recompute the KKT map
    at the returned weights, in data order (consensus blocks are shuffled).
    """
    if config.loss is LossKind.HINGE:
        return sol.U
    return dual_weights_from_margins(config.loss, scores_to_margins(H @ sol.W, y0, config.mode))


def train(data, config=None, test=None, callback=None):
    """Run column generation; returns ``(EnsembleModel, TrainTrace)``."""
    config = config or TrainConfig()
    data.check_trainable()
    m, k = data.m, data.k
    searcher = StumpSearcher(data.features)
    kind = edge_kind(config)
    master = _Master(data, config)
    U = initial_dual_weights(config.loss, m, k)
    stumps, columns = [], []
    seen = {}
    trace = TrainTrace()
    model = EnsembleModel((), np.zeros((0, k)), k, config.to_dict())
    retried = False

    t = 0
    while t < config.T:
        G = edge_weights(U, data.y0, kind)
        stump, r, edge = searcher.search(G)
        e_vec = searcher.edge_vector(stump, G)
        stop = stopping_margin(config.reg, e_vec)
        if stop < config.nu + config.eps and config.reg is not RegKind.L1:
            # the largest single edge need not carry the largest group
            # statistic; sweep before stopping
            cand, cand_vec, cand_stop = searcher.search_rows(
                G, lambda E: stopping_margins(config.reg, E))
            if cand_stop >= config.nu + config.eps:
                stump, e_vec, stop = cand, cand_vec, cand_stop
                r = int(np.argmax(e_vec))
                edge = float(e_vec[r])
        trace.final_stop_margin = stop
        if stop < config.nu + config.eps:
            trace.stop_reason = "margin"
            break
        col = stump_column(stump, data.features)
        key = col.tobytes()
        if key in seen:
            # An admitted column priced in again: the master is under-resolved.
            if retried or not columns:
                warnings.warn(f"iteration {t}: duplicate column after a tightened "
                              "re-solve; stopping", RuntimeWarning)
                trace.stop_reason = "duplicate"
                break
            retried = True
            H = np.column_stack(columns)
            sol = master.solve(H, tighten=1e-2)
            master.update(sol)
            U = _dual_weights(config, sol, H, data.y0)
            continue
        retried = False

        H = np.column_stack(columns + [col])
        try:
            sol = master.solve(H)
        except ConvergenceError as err:
            raise ConvergenceError(f"iteration {t}: {err}", err.residuals,
                                   err.solution) from err
        seen[key] = len(columns)
        columns.append(col)
        stumps.append(stump)
        master.update(sol)
        U = _dual_weights(config, sol, H, data.y0)
        model = EnsembleModel(tuple(stumps), sol.W, k, config.to_dict())
        rec = TraceRecord(iteration=t, feature=stump.feature_index,
                          threshold=stump.threshold, polarity=stump.polarity,
                          cls=r + 1, edge=edge, stop_margin=stop,
                          objective=sol.objective,
                          train_error=error_rate(model, data),
                          test_error=error_rate(model, test))
        trace.records.append(rec)
        log.debug("iter %d edge %.6g obj %.10g err %.4f", t, edge, sol.objective,
                  rec.train_error)
        if callback is not None:
            callback(rec, sol)
        t += 1

    trace.final_dual_weights = U
    return model, trace
