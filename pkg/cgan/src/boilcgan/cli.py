"""Command-line front end: train, infer, score.

Exit codes follow the simulation toolchain's convention: 0 ok, 2 bad
arguments or configuration, 3 training divergence, 4 data errors.
"""

import argparse
import sys
from pathlib import Path

from .containers import ContainerError
from .infer import infer_file, mirror_consistency, predict
from .train import (MODEL_TABLE, TrainConfig, TrainingDiverged, model_config,
                    train, load_checkpoint)
from .containers import read_stacks

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_DATA = 4


def _stack_paths(args):
    if args.stacks:
        return [Path(p) for p in args.stacks]
    if not args.data or not args.datasets:
        raise ValueError("give --stacks files or --data with --datasets")
    ids = [int(t) for t in args.datasets.split(",") if t.strip()]
    return [Path(args.data) / f"dataset_{i}.stacks" for i in ids]


def cmd_train(args):
    overrides = dict(epochs=args.epochs, seed=args.seed,
                     depth=args.depth, base_width=args.width,
                     disc_width=args.disc_width, lr=args.lr)
    if args.model is not None:
        config = model_config(args.model, **overrides)
    else:
        config = TrainConfig(lambda_rec=args.lambda_rec,
                             lambda_ibc=args.lambda_ibc,
                             mode=args.mode, **overrides)
    result = train(_stack_paths(args), args.out, config, name=args.name)
    print(f"trained {result.steps} steps on {result.samples} samples")
    print(f"checkpoint: {result.checkpoint}")
    print(f"losses: {result.losses_csv}")
    return EXIT_OK


def cmd_infer(args):
    out = infer_file(args.checkpoint, args.stacks_file, args.out)
    print(f"predictions: {out}")
    return EXIT_OK


def cmd_score(args):
    gen, _ = load_checkpoint(args.checkpoint)
    inputs, _, _, _ = read_stacks(args.stacks_file)
    score = mirror_consistency(gen, inputs)
    print(f"mirror_consistency {score:.6g}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="boilcgan",
        description="conditional GAN trainer for contour-to-temperature "
                    "inference")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train a model variant")
    t.add_argument("--stacks", nargs="*", help="stack container files")
    t.add_argument("--data", help="directory holding dataset_<i>.stacks")
    t.add_argument("--datasets", help="comma list of dataset ids")
    t.add_argument("--model", type=int, choices=sorted(MODEL_TABLE),
                   help="numbered variant from the published table")
    t.add_argument("--lambda-rec", type=float, default=10.0)
    t.add_argument("--lambda-ibc", type=float, default=5.0)
    t.add_argument("--mode", default="none",
                   choices=("none", "input_augmentation", "additional_loss"))
    t.add_argument("--epochs", type=int, default=10)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--depth", type=int, default=4)
    t.add_argument("--width", type=int, default=64,
                   help="generator base width")
    t.add_argument("--disc-width", type=int, default=64)
    t.add_argument("--lr", type=float, default=1e-4)
    t.add_argument("--name", default="model")
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_train)

    i = sub.add_parser("infer", help="predict temperature maps for stacks")
    i.add_argument("--checkpoint", required=True)
    i.add_argument("--stacks", dest="stacks_file", required=True)
    i.add_argument("--out", required=True)
    i.set_defaults(func=cmd_infer)

    s = sub.add_parser("score", help="mirror-consistency of a checkpoint")
    s.add_argument("--checkpoint", required=True)
    s.add_argument("--stacks", dest="stacks_file", required=True)
    s.set_defaults(func=cmd_score)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TrainingDiverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (ContainerError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
