"""Command line entry point: ``multiboost {train,predict,eval,synth}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 convergence error.
Diagnostics go to standard error.
"""

import argparse
import logging
import sys

import numpy as np

from .booster import TrainConfig, train
from .io import (DataFormat, ParseError, evaluation_report, format_report, load_dataset,
                 load_model, save_dataset, save_model, save_trace)
from .solvers import ConvergenceError, LPError
from .synth import SynthKind, SynthSpec, generate

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CONVERGENCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _data_args(p):
    p.add_argument("--data", required=True, help="dataset file")
    p.add_argument("--format", choices=[f.value for f in DataFormat], default="csv")
    p.add_argument("--header", action="store_true", help="skip the first CSV line")


def build_parser():
    parser = _Parser(prog="multiboost",
                     description="Fully-corrective multi-class boosting with decision stumps.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = TrainConfig()
    p = sub.add_parser("train", help="train an ensemble")
    _data_args(p)
    p.add_argument("--loss", choices=["hinge", "exp", "logistic"], default=d.loss.value)
    p.add_argument("--reg", choices=["l1", "l12", "l1inf"], default=d.reg.value)
    p.add_argument("--nu", type=float, default=d.nu, help="regularization weight")
    p.add_argument("--iters", type=int, default=d.T, help="maximum number of stumps T")
    p.add_argument("--eps", type=float, default=d.eps, help="stopping tolerance")
    p.add_argument("--mode", choices=["pairwise", "fast"], default=d.mode.value)
    p.add_argument("--admm-lambda", type=float, default=d.admm_lambda)
    p.add_argument("--admm-iters", type=int, default=d.admm_max_iter)
    p.add_argument("--blocks", type=int, default=d.blocks, help="consensus data blocks")
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--strict", action="store_true",
                   help="fail when an ADMM master hits its iteration cap")
    p.add_argument("--test", help="optional test set, recorded in the trace")
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--trace", help="trace file to write")

    p = sub.add_parser("predict", help="write one predicted label per line")
    p.add_argument("--model", required=True)
    _data_args(p)
    p.add_argument("--out", help="output file (default: standard output)")

    p = sub.add_parser("eval", help="error rate, confusion matrix and stump sharing")
    p.add_argument("--model", required=True)
    _data_args(p)

    p = sub.add_parser("synth", help="write a synthetic benchmark")
    p.add_argument("--kind", choices=[k.value for k in SynthKind], required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--split", type=float, default=1.0,
                   help="fraction of each class's training draw to keep")
    p.add_argument("--format", choices=[f.value for f in DataFormat], default="csv")
    p.add_argument("--out-train", required=True)
    p.add_argument("--out-test", required=True)
    return parser


def _load(args, path=None):
    return load_dataset(path or args.data, args.format, args.header)


def cmd_train(args):
    try:
        config = TrainConfig(loss=args.loss, reg=args.reg, nu=args.nu, T=args.iters,
                             eps=args.eps, mode=args.mode, admm_lambda=args.admm_lambda,
                             admm_max_iter=args.admm_iters, blocks=args.blocks,
                             seed=args.seed, strict=args.strict)
    except ValueError as err:
        raise UsageError(str(err)) from None
    data = _load(args)
    test = _load(args, args.test) if args.test else None
    model, trace = train(data, config, test=test)
    save_model(model, args.out)
    if args.trace:
        save_trace(trace, args.trace)
    last = trace.records[-1] if trace.records else None
    print(f"stumps {model.n} stop {trace.stop_reason}"
          + (f" objective {last.objective:.10g} train_error {last.train_error:.4f}"
             if last else ""), file=sys.stderr)


def cmd_predict(args):
    model = load_model(args.model)
    data = _load(args)
    pred = model.predict(data.features) if model.n else np.ones(data.m, dtype=int)
    text = "".join(f"{int(p)}\n" for p in pred)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_eval(args):
    model = load_model(args.model)
    data = _load(args)
    sys.stdout.write(format_report(evaluation_report(model, data)))


def cmd_synth(args):
    try:
        spec = SynthSpec(args.kind, seed=args.seed, split=args.split)
    except ValueError as err:
        raise UsageError(str(err)) from None
    tr, te = generate(spec)
    save_dataset(tr, args.out_train, args.format)
    save_dataset(te, args.out_test, args.format)


COMMANDS = {"train": cmd_train, "predict": cmd_predict, "eval": cmd_eval, "synth": cmd_synth}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except UsageError as err:
        print(f"multiboost: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as err:
        print(f"multiboost: convergence error: {err}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (ParseError, OSError, ValueError, LPError) as err:
        print(f"multiboost: data error: {err}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
