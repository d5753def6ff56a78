"""Domain types shared by the solvers and the training loop.

Class labels are 1-based on every public surface and 0-based inside the
numerical code; ``Dataset.y0`` is the only bridge between the two.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "Dataset",
    "DecisionStump",
    "EnsembleModel",
    "MarginMatrix",
    "MarginMode",
    "margins",
    "predict",
    "response_matrix",
    "scores_to_margins",
]


class MarginMode(str, Enum):
    PAIRWISE = "pairwise"
    FAST = "fast"


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    """Feature matrix plus 1-based integer labels.

    ``k`` defaults to the largest label present; pass it explicitly for a
    test split that might be missing the top class.
    """

    features: np.ndarray
    labels: np.ndarray
    k: int = None

    def __post_init__(self):
        X = _frozen(self.features)
        if X.ndim != 2:
            raise ValueError("features must be a 2-D array")
        y = np.asarray(self.labels)
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise ValueError("labels must be a vector with one entry per row")
        if y.size and not np.all(np.equal(np.mod(y, 1), 0)):
            raise ValueError("labels must be integers")
        y = _frozen(y, dtype=np.int64)
        if not np.all(np.isfinite(X)):
            raise ValueError("features contain NaN or Inf")
        if y.size and y.min() < 1:
            raise ValueError("labels must be >= 1")
        k = self.k
        if k is None:
            k = int(y.max()) if y.size else 0
        elif y.size and y.max() > k:
            raise ValueError(f"label {int(y.max())} exceeds k={k}")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "k", int(k))

    @property
    def m(self):
        return self.features.shape[0]

    @property
    def d(self):
        return self.features.shape[1]

    @property
    def y0(self):
        return self.labels - 1

    def class_counts(self):
        return np.bincount(self.y0, minlength=self.k)

    def check_trainable(self):
        if self.m == 0:
            raise ValueError("empty dataset")
        if self.k < 2:
            raise ValueError("need at least two classes")
        missing = np.flatnonzero(self.class_counts() == 0)
        if missing.size:
            raise ValueError(f"classes {list(missing + 1)} have no examples")

    def subset(self, idx):
        return Dataset(self.features[idx], self.labels[idx], k=self.k)


@dataclass(frozen=True)
class DecisionStump:
    """Axis-aligned threshold classifier with output in {-1, +1}.

    ``h(x) = polarity`` when ``x[feature_index] > threshold``, otherwise
    ``-polarity``. The comparison is strict.
    """

    feature_index: int
    threshold: float
    polarity: int = 1

    def __post_init__(self):
        if self.polarity not in (-1, 1):
            raise ValueError("polarity must be -1 or +1")
        if self.feature_index < 0:
            raise ValueError("feature_index must be non-negative")
        object.__setattr__(self, "feature_index", int(self.feature_index))
        object.__setattr__(self, "threshold", float(self.threshold))
        object.__setattr__(self, "polarity", int(self.polarity))

    def __call__(self, X):
        X = np.asarray(X, dtype=float)
        col = X[..., self.feature_index]
        return np.where(col > self.threshold, self.polarity, -self.polarity).astype(float)


def response_matrix(stumps, X):
    """m x n matrix of +-1 stump responses (one column per stump)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if not stumps:
        return np.zeros((X.shape[0], 0))
    return np.column_stack([s(X) for s in stumps])


@dataclass(frozen=True)
class EnsembleModel:
    stumps: tuple
    weights: np.ndarray
    k: int
    config: dict = field(default=None, compare=False)

    def __post_init__(self):
        stumps = tuple(self.stumps)
        W = _frozen(self.weights)
        if W.size == 0:
            W = _frozen(np.zeros((len(stumps), self.k)))
        if W.ndim != 2 or W.shape != (len(stumps), self.k):
            raise ValueError(f"weights must have shape ({len(stumps)}, {self.k})")
        if np.any(W < 0):
            raise ValueError("weights must be non-negative")
        object.__setattr__(self, "stumps", stumps)
        object.__setattr__(self, "weights", W)

    @property
    def n(self):
        return len(self.stumps)

    @property
    def n_features(self):
        return max((s.feature_index for s in self.stumps), default=-1) + 1

    def decision_function(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] < self.n_features:
            raise ValueError(
                f"input has {X.shape[1]} features, model uses {self.n_features}")
        return response_matrix(self.stumps, X) @ self.weights

    def predict(self, X):
        """1-based class labels; ties go to the smallest class index."""
        S = self.decision_function(X)
        if S.shape[1] == 0:
            raise ValueError("model has no classes")
        # np.argmax returns the first maximum, which is the tie-break rule.
        return np.argmax(S, axis=1) + 1

    def with_extra_row(self, stump):
        """Copy with one more stump carrying an all-zero weight row."""
        W = np.vstack([self.weights, np.zeros((1, self.k))])
        return EnsembleModel(self.stumps + (stump,), W, self.k, self.config)


def predict(model, x):
    """Predicted 1-based class of a single feature vector."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("x must be a single feature vector")
    if model.n and x.shape[0] < model.n_features:
        raise ValueError(f"x has {x.shape[0]} entries, model uses {model.n_features}")
    return int(model.predict(x[None, :])[0])


@dataclass(frozen=True)
class MarginMatrix:
    values: np.ndarray
    labels0: np.ndarray
    mode: MarginMode = MarginMode.PAIRWISE

    def __post_init__(self):
        object.__setattr__(self, "mode", MarginMode(self.mode))

    @property
    def m(self):
        return self.values.shape[0]

    @property
    def k(self):
        return self.values.shape[1]


def sign_matrix(labels0, k):
    """y_{ir} = +1 if r is the label of example i, else -1."""
    Y = -np.ones((len(labels0), k))
    Y[np.arange(len(labels0)), labels0] = 1.0
    return Y


def scores_to_margins(S, labels0, mode=MarginMode.PAIRWISE):
    """Margins from the m x k score matrix ``S = H W``."""
    mode = MarginMode(mode)
    labels0 = np.asarray(labels0)
    if mode is MarginMode.PAIRWISE:
        rho = S[np.arange(S.shape[0]), labels0][:, None] - S
        # exact zero on the label column, independent of rounding
        rho[np.arange(S.shape[0]), labels0] = 0.0
    else:
        rho = sign_matrix(labels0, S.shape[1]) * S
    return MarginMatrix(rho, labels0, mode)


def margins(model, data, mode=MarginMode.PAIRWISE):
    if model.n and data.d < model.n_features:
        raise ValueError("model and data disagree on the feature count")
    if data.m and data.labels.max() > model.k:
        raise ValueError(f"data has label {data.labels.max()}, model has k={model.k}")
    if model.n == 0:
        S = np.zeros((data.m, model.k))
    else:
        S = model.decision_function(data.features)
    return scores_to_margins(S, data.y0, mode)
