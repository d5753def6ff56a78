"""Fully-corrective multi-class boosting with shared decision stumps.

Column generation grows an ensemble of decision stumps one column at a
time. After each admission every weight is re-optimized in a restricted
master problem: an LP for the hinge loss with an l1 penalty, projected
Newton for the exponential loss, and ADMM for the logistic loss and for the
row-norm (l1,2 and l1,inf) penalties that let classes share stumps.
"""

from .booster import TraceRecord, TrainConfig, TrainTrace, objective, train
from .losses import LossKind, loss_gradient, loss_value
from .model import (Dataset, DecisionStump, EnsembleModel, MarginMode, margins,
                    predict, response_matrix)
from .regularizers import RegKind, norm_value, prox_row, stopping_margin
from .synth import SynthKind, SynthSpec, generate
from .weak_learner import EdgeKind, best_stump, edge_weights

__all__ = [
    "Dataset", "DecisionStump", "EdgeKind", "EnsembleModel", "LossKind", "MarginMode",
    "RegKind", "SynthKind", "SynthSpec", "TraceRecord", "TrainConfig", "TrainTrace",
    "best_stump", "edge_weights", "generate", "loss_gradient", "loss_value", "margins",
    "norm_value", "objective", "predict", "prox_row", "response_matrix",
    "stopping_margin", "train",
]
