"""Command-line entry point: ``lalrnet --synth 2000,32,8,0.1 --hidden 64 ...``."""
from __future__ import annotations

import argparse
import logging
import os
import sys

from .activations import ActivationKind
from .errors import LalrError
from .experiment import ExperimentConfig, SynthSpec, emit_outputs, run_experiment
from .schedulers import (
    DEFAULT_DECAY_MAX,
    DEFAULT_DECAY_MIN,
    DEFAULT_FIXED_LR,
    DEFAULT_LALR_SCALE,
    DecayLR,
    FixedLR,
    LipschitzLR,
)

SEED_ENV = "LALRNET_SEED"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lalrnet", description=__doc__)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", help="CSV file with header, landmark columns first")
    src.add_argument("--synth", type=SynthSpec.parse, metavar="m,d_in,d_out,noise",
                     help="generate a synthetic regression task instead of reading a file")
    p.add_argument("--landmark", type=int, help="number of landmark (input) columns in --data")
    p.add_argument("--hidden", default="1500",
                   help="comma-separated hidden layer widths; empty for linear regression")
    p.add_argument("--activation", choices=["sigmoid", "tanh", "relu", "arelu", "sbaf"], default="tanh")
    p.add_argument("--arelu-k", type=float, default=0.6)
    p.add_argument("--arelu-n", type=float, default=1.2)
    p.add_argument("--sbaf-k", type=float, default=1.0)
    p.add_argument("--sbaf-alpha", type=float, default=0.5)
    p.add_argument("--lr-policy", choices=["fixed", "decay", "lalr"], default="lalr")
    p.add_argument("--lr", type=float, default=DEFAULT_FIXED_LR, help="rate for the fixed policy")
    p.add_argument("--lr-max", type=float, default=DEFAULT_DECAY_MAX)
    p.add_argument("--lr-min", type=float, default=DEFAULT_DECAY_MIN)
    p.add_argument("--lalr-scale", type=float, default=DEFAULT_LALR_SCALE)
    p.add_argument("--lalr-granularity", choices=["epoch", "batch"], default="epoch")
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--batch", type=int, default=200)
    p.add_argument("--subsamples", type=int, default=6)
    p.add_argument("--subsample-size", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="runs/latest")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args, environ=os.environ) -> ExperimentConfig:
    if args.activation == "arelu":
        activation = ActivationKind.arelu(args.arelu_k, args.arelu_n)
    elif args.activation == "sbaf":
        activation = ActivationKind.sbaf(args.sbaf_k, args.sbaf_alpha)
    else:
        activation = ActivationKind(args.activation)

    if args.lr_policy == "fixed":
        policy = FixedLR(args.lr)
    elif args.lr_policy == "decay":
        policy = DecayLR(args.lr_max, args.lr_min)
    else:
        policy = LipschitzLR(args.lalr_scale, args.lalr_granularity, fallback=args.lr_min)

    seed = args.seed
    if environ.get(SEED_ENV):
        seed = int(environ[SEED_ENV])

    hidden = [int(h) for h in args.hidden.split(",") if h.strip()]
    return ExperimentConfig(
        hidden_sizes=hidden,
        activation=activation,
        lr_policy=policy,
        data_path=args.data,
        synth=args.synth,
        n_landmark=args.landmark,
        epochs=args.epochs,
        iterations_per_epoch=args.iters,
        batch_size=args.batch,
        subsample_size=args.subsample_size,
        subsample_count=args.subsamples,
        seed=seed,
        out_dir=args.out,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        metrics = run_experiment(cfg)
        paths = emit_outputs(metrics, cfg.out_dir)
    except (LalrError, OSError) as exc:
        print(f"lalrnet: error: {exc}", file=sys.stderr)
        return 1
    mean, sigma = metrics.summary()
    print(f"mean test MAE {mean:.6f} (sigma {sigma:.6f}) over {len(metrics.final_mae)} subsamples; "
          f"outputs in {paths['summary.json'].parent}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
