"""Synthetic benchmarks: four planar Gaussian clusters and six concentric rings.

Random streams come from numpy's PCG64. A spec's seed feeds one
``SeedSequence``; its first two children drive the train and test draws, and
each of those spawns one child per class, so a class's points do not depend
on how many points other classes draw.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import Dataset

GAUSS4_MEANS = np.array([[1.5, 1.5], [-1.5, 1.5], [-1.5, -1.5], [1.5, -1.5]])
GAUSS4_STDS = np.array([0.4, 0.6, 0.8, 1.0])
GAUSS4_PER_CLASS = 50

RING6_CLASSES = 6
RING6_BASE = 50


class SynthKind(str, Enum):
    GAUSS4 = "gauss4"
    RING6 = "ring6"


@dataclass(frozen=True)
class SynthSpec:
    kind: SynthKind
    seed: int = 0
    split: float = 1.0   # fraction of each class's training draw that is kept

    def __post_init__(self):
        object.__setattr__(self, "kind", SynthKind(self.kind))
        if not 0.0 < self.split <= 1.0:
            raise ValueError("split must lie in (0, 1]")


def _gauss4_class(rng, c, count):
    return GAUSS4_MEANS[c] + GAUSS4_STDS[c] * rng.standard_normal((count, 2))


def ring6_count(c):
    """Points per split for 1-based ring ``c``."""
    return RING6_BASE * c


def _ring6_class(rng, c, count):
    theta = rng.uniform(0.0, 2.0 * np.pi, count)
    radius = rng.uniform(c, c + 1.0, count)   # c is 0-based here
    return np.column_stack([radius * np.cos(theta), radius * np.sin(theta)])


def _draw(spec, seq, keep_fraction):
    k = 4 if spec.kind is SynthKind.GAUSS4 else RING6_CLASSES
    X, y = [], []
    for c, child in enumerate(seq.spawn(k)):
        rng = np.random.Generator(np.random.PCG64(child))
        if spec.kind is SynthKind.GAUSS4:
            pts = _gauss4_class(rng, c, GAUSS4_PER_CLASS)
        else:
            pts = _ring6_class(rng, c, ring6_count(c + 1))
        keep = int(np.ceil(keep_fraction * len(pts)))
        X.append(pts[:keep])
        y.append(np.full(keep, c + 1))
    return Dataset(np.vstack(X), np.concatenate(y), k=k)


def generate(spec):
    """``(train, test)`` datasets; a pure function of ``(kind, seed, split)``."""
    train_seq, test_seq = np.random.SeedSequence(spec.seed).spawn(2)
    return _draw(spec, train_seq, spec.split), _draw(spec, test_seq, 1.0)
