"""Train an l1 and an l12 ensemble on the six-ring benchmark and compare.

Prints train/test error and how many classes each stump serves. A sparse
l1 fit gives most stumps a single class; the l12 fit shares them widely.

    python3 demos/ring6_sharing.py [T]    (default 100, about 4 minutes)
"""
import sys
import time

from multiboost import SynthSpec, TrainConfig, generate, train
from multiboost.io import sharing_histogram


def run(tr, te, T, **kw):
    t0 = time.perf_counter()
    model, trace = train(tr, TrainConfig(T=T, **kw), test=te)
    last = trace.records[-1]
    hist = sharing_histogram(model.weights)
    shares = "  ".join(f"{b['label']}:{b['fraction']:.2f}" for b in hist["buckets"])
    print(f"{kw['loss']:>8s} {kw['reg']:>5s}  stumps {model.n:3d}  "
          f"train {last.train_error:.3f}  test {last.test_error:.3f}  "
          f"{time.perf_counter() - t0:6.1f}s  classes per stump {shares}")


if __name__ == "__main__":
    T = int(sys.argv[1]) if len(sys.argv) > 1 else 100
    tr, te = generate(SynthSpec("ring6", seed=7))
    run(tr, te, T, loss="logistic", reg="l1", nu=1e-3)
    run(tr, te, T, loss="logistic", reg="l12", nu=1e-4)
