"""Dataset files, model files, trace files and evaluation reports.

Formats
-------
CSV
    One example per line, comma separated. The first field is the 1-based
    integer label, the rest are features. An optional header line is skipped
    when ``header=True``.
SPARSE
    One example per line: ``label idx:val idx:val ...`` separated by single
    spaces, 1-based feature indices, absent features are 0. The feature
    count is the largest index seen.
Model
    Line-oriented text, single spaces, floats written with ``repr`` so a
    save/load round trip is bit-exact::

        multiboost-model 1
        k <classes>
        n <stumps>
        config <one-line JSON>
        stump <feature (0-based)> <threshold> <polarity>     (n lines)
        weights
        <k weights>                                            (n lines)

Trace
    A header line of field names, then one record per line, single spaces.
    Lines starting with ``#`` carry the stop reason and final stopping
    statistic.

All files use '.' as decimal point and line feed terminators.
"""

import json
import math
from dataclasses import fields
from enum import Enum

import numpy as np

from .booster import TraceRecord, TrainTrace
from .model import Dataset, DecisionStump, EnsembleModel

MODEL_MAGIC = "multiboost-model"
MODEL_VERSION = 1
SHARE_THRESHOLD = 1e-8


class DataFormat(str, Enum):
    CSV = "csv"
    SPARSE = "sparse"


class ParseError(ValueError):
    """Malformed input file; ``line`` is 1-based (0 when not line specific)."""

    def __init__(self, message, line=0, path=None):
        where = f"{path}:" if path else ""
        where += f"{line}: " if line else (" " if path else "")
        super().__init__(where + message)
        self.reason = message
        self.line = line
        self.path = path


def _number(text, lineno, what="value"):
    try:
        x = float(text)
    except ValueError:
        raise ParseError(f"non-numeric {what} {text!r}", lineno) from None
    if not math.isfinite(x):
        raise ParseError(f"non-finite {what} {text!r}", lineno)
    return x


def _label(text, lineno):
    try:
        y = int(text)
    except ValueError:
        x = _number(text, lineno, "label")
        if x != int(x):
            raise ParseError(f"label {text!r} is not an integer", lineno) from None
        y = int(x)
    if y < 1:
        raise ParseError(f"label {y} is below 1", lineno)
    return y


def _parse_csv(lines, header):
    rows, labels = [], []
    width = None
    for lineno, line in enumerate(lines, 1):
        if header and lineno == 1:
            continue
        line = line.strip()
        if not line:
            continue
        cells = [c.strip() for c in line.split(",")]
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise ParseError(f"expected {width} fields, found {len(cells)}", lineno)
        labels.append(_label(cells[0], lineno))
        rows.append([_number(c, lineno) for c in cells[1:]])
    return rows, labels, (width or 1) - 1


def _parse_sparse(lines):
    entries, labels = [], []
    d = 0
    for lineno, line in enumerate(lines, 1):
        parts = line.split()
        if not parts:
            continue
        labels.append(_label(parts[0], lineno))
        row = {}
        for tok in parts[1:]:
            idx, sep, val = tok.partition(":")
            if not sep:
                raise ParseError(f"expected idx:val, found {tok!r}", lineno)
            try:
                j = int(idx)
            except ValueError:
                raise ParseError(f"non-integer feature index {idx!r}", lineno) from None
            if j < 1:
                raise ParseError(f"feature index {j} is below 1", lineno)
            if j in row:
                raise ParseError(f"duplicate feature index {j}", lineno)
            row[j] = _number(val, lineno)
            d = max(d, j)
        entries.append(row)
    rows = np.zeros((len(entries), d))
    for i, row in enumerate(entries):
        for j, v in row.items():
            rows[i, j - 1] = v
    return rows, labels, d


def parse_dataset(text, format=DataFormat.CSV, header=False):
    """Parse dataset text; see the module docstring for the formats."""
    format = DataFormat(format)
    lines = text.splitlines()
    if format is DataFormat.CSV:
        rows, labels, d = _parse_csv(lines, header)
    else:
        rows, labels, d = _parse_sparse(lines)
    if not labels:
        raise ParseError("no examples found")
    X = np.asarray(rows, dtype=float).reshape(len(labels), d)
    return Dataset(X, np.asarray(labels, dtype=int))


def load_dataset(path, format=DataFormat.CSV, header=False):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return parse_dataset(text, format, header)
    except ParseError as err:
        raise ParseError(err.reason, err.line, path) from None


def format_dataset(data, format=DataFormat.CSV):
    """Serialize a dataset; floats use ``repr`` so reloading is exact."""
    format = DataFormat(format)
    out = []
    for x, y in zip(data.features, data.labels):
        if format is DataFormat.CSV:
            out.append(",".join([str(int(y))] + [repr(float(v)) for v in x]))
        else:
            toks = [f"{j + 1}:{float(v)!r}" for j, v in enumerate(x) if v != 0]
            out.append(" ".join([str(int(y))] + toks))
    return "\n".join(out) + "\n"


def save_dataset(data, path, format=DataFormat.CSV):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_dataset(data, format))


# models

def format_model(model):
    lines = [f"{MODEL_MAGIC} {MODEL_VERSION}", f"k {model.k}", f"n {model.n}",
             "config " + json.dumps(model.config or {}, sort_keys=True)]
    for s in model.stumps:
        lines.append(f"stump {s.feature_index} {float(s.threshold)!r} {s.polarity}")
    lines.append("weights")
    for row in model.weights:
        lines.append(" ".join(repr(float(w)) for w in row))
    return "\n".join(lines) + "\n"


def _expect(lines, pos, key):
    if pos >= len(lines):
        raise ParseError(f"unexpected end of file, expected {key!r}", pos + 1)
    parts = lines[pos].split(" ", 1)
    if parts[0] != key:
        raise ParseError(f"expected {key!r}, found {parts[0]!r}", pos + 1)
    return parts[1] if len(parts) > 1 else ""


def parse_model(text):
    lines = text.splitlines()
    if not lines or not lines[0].startswith(MODEL_MAGIC + " "):
        raise ParseError("not a model file", 1)
    version = lines[0].split(" ", 1)[1].strip()
    if version != str(MODEL_VERSION):
        raise ParseError(f"unsupported model format version {version!r}", 1)
    try:
        k = int(_expect(lines, 1, "k"))
        n = int(_expect(lines, 2, "n"))
    except ValueError as err:
        raise ParseError(f"bad header: {err}", 2) from None
    try:
        config = json.loads(_expect(lines, 3, "config"))
    except json.JSONDecodeError as err:
        raise ParseError(f"bad config JSON: {err}", 4) from None
    stumps = []
    for t in range(n):
        pos = 4 + t
        parts = _expect(lines, pos, "stump").split()
        if len(parts) != 3:
            raise ParseError("stump lines hold feature, threshold, polarity", pos + 1)
        try:
            stumps.append(DecisionStump(int(parts[0]), float(parts[1]), int(parts[2])))
        except ValueError as err:
            raise ParseError(str(err), pos + 1) from None
    _expect(lines, 4 + n, "weights")
    W = np.zeros((n, k))
    for t in range(n):
        pos = 5 + n + t
        if pos >= len(lines):
            raise ParseError("missing weight rows", pos + 1)
        vals = lines[pos].split()
        if len(vals) != k:
            raise ParseError(f"expected {k} weights, found {len(vals)}", pos + 1)
        W[t] = [_number(v, pos + 1, "weight") for v in vals]
    if any(line.strip() for line in lines[5 + 2 * n:]):
        raise ParseError("trailing content after the weight rows", 6 + 2 * n)
    try:
        return EnsembleModel(tuple(stumps), W, k, config)
    except ValueError as err:
        raise ParseError(str(err)) from None


def save_model(model, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_model(model))


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


# traces

TRACE_FIELDS = [f.name for f in fields(TraceRecord)]
_TRACE_TYPES = {f.name: (int if f.type in (int, "int") else float) for f in fields(TraceRecord)}


def format_trace(trace):
    out = [" ".join(TRACE_FIELDS)]
    for rec in trace.records:
        out.append(" ".join(repr(getattr(rec, name)) for name in TRACE_FIELDS))
    out.append(f"# stop_reason {trace.stop_reason}")
    out.append(f"# final_stop_margin {float(trace.final_stop_margin)!r}")
    return "\n".join(out) + "\n"


def parse_trace(text):
    lines = text.splitlines()
    if not lines or lines[0].split() != TRACE_FIELDS:
        raise ParseError("trace header does not match the record fields", 1)
    trace = TrainTrace()
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "stop_reason":
                trace.stop_reason = parts[1]
            elif len(parts) == 2 and parts[0] == "final_stop_margin":
                trace.final_stop_margin = float(parts[1])
            continue
        vals = line.split()
        if len(vals) != len(TRACE_FIELDS):
            raise ParseError(f"expected {len(TRACE_FIELDS)} fields", lineno)
        try:
            rec = {name: _TRACE_TYPES[name](v) for name, v in zip(TRACE_FIELDS, vals)}
        except ValueError as err:
            raise ParseError(str(err), lineno) from None
        trace.records.append(TraceRecord(**rec))
    return trace


def save_trace(trace, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_trace(trace))


def load_trace(path):
    with open(path, encoding="utf-8") as fh:
        return parse_trace(fh.read())


# reports

def confusion_matrix(y_true, y_pred, k):
    """``C[a, b]`` counts examples of class ``a+1`` predicted as ``b+1``."""
    C = np.zeros((k, k), dtype=int)
    np.add.at(C, (np.asarray(y_true) - 1, np.asarray(y_pred) - 1), 1)
    return C


def sharing_buckets(k):
    """Class-count ranges ``(lo, hi)`` of the sharing report: 1, 2..ceil(k/2), the rest."""
    half = max(1, math.ceil(k / 2))
    return [(1, 1), (2, half), (half + 1, k)]


def sharing_histogram(W, threshold=SHARE_THRESHOLD):
    """How many classes each stump serves, bucketed.

    A stump serves class ``r`` when ``W[j, r] > threshold``. Returns a dict
    with the per-stump counts, the number of unused stumps (no class), and
    for each bucket its label, count and fraction of the used stumps.
    """
    W = np.asarray(W, dtype=float)
    k = W.shape[1] if W.ndim == 2 else 0
    per_stump = (W > threshold).sum(axis=1) if W.size else np.zeros(0, dtype=int)
    used = int((per_stump > 0).sum())
    half = max(1, math.ceil(k / 2))
    mid = "none" if half < 2 else ("2" if half == 2 else f"2-{half}")
    labels = ["1", mid, f">{half}"]
    buckets = []
    for label, (lo, hi) in zip(labels, sharing_buckets(k)):
        count = int(((per_stump >= lo) & (per_stump <= hi)).sum())
        buckets.append({"label": label, "lo": lo, "hi": hi, "count": count,
                        "fraction": count / used if used else 0.0})
    return {"per_stump": per_stump, "unused": int(len(per_stump) - used),
            "used": used, "buckets": buckets}


def evaluation_report(model, data):
    """Error rate, confusion matrix and sharing histogram as a dict."""
    pred = model.predict(data.features) if model.n else np.ones(data.m, dtype=int)
    k = max(model.k, data.k)
    return {"error": float(np.mean(pred != data.labels)),
            "confusion": confusion_matrix(data.labels, pred, k),
            "sharing": sharing_histogram(model.weights)}


def format_report(report):
    lines = [f"error {report['error']!r}", "confusion (rows: true class, columns: predicted)"]
    C = report["confusion"]
    width = max(len(str(C.max())) if C.size else 1, len(str(C.shape[0])))
    lines.append(" " * (width + 1) + " ".join(f"{c + 1:>{width}}" for c in range(C.shape[1])))
    for r, row in enumerate(C):
        lines.append(f"{r + 1:>{width}} " + " ".join(f"{v:>{width}}" for v in row))
    sh = report["sharing"]
    lines.append(f"sharing (stumps: {sh['used']} used, {sh['unused']} unused)")
    for b in sh["buckets"]:
        lines.append(f"  classes {b['label']:>5}: {b['count']:4d} {100 * b['fraction']:6.1f}%")
    return "\n".join(lines) + "\n"
