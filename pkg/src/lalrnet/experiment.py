"""Experiment runner: sub-sampled training runs, metric logging and output files."""
from __future__ import annotations

import csv
import json
import logging
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .activations import ActivationKind, Tanh
from .data import Dataset, load_csv, subsample, synth_regression
from .errors import DegenerateConstantError, LalrError, ParameterError, RunError
from .network import Network, backward, forward, init_network, mae, mse_loss, predict, sgd_step
from .schedulers import (
    PER_BATCH,
    DecayLR,
    FixedLR,
    LipschitzLR,
    LrPolicy,
    compute_constants,
    decay_lr,
    lipschitz_lr,
)

log = logging.getLogger(__name__)

METRICS_HEADER = ["epoch", "subsample", "lr", "train_mse", "test_mae"]


@dataclass(frozen=True)
class SynthSpec:
    m: int
    d_in: int
    d_out: int
    noise_sd: float = 0.0

    @classmethod
    def parse(cls, text: str) -> "SynthSpec":
        parts = text.split(",")
        if len(parts) != 4:
            raise ParameterError(f"synthetic spec must be m,d_in,d_out,noise, got {text!r}")
        return cls(int(parts[0]), int(parts[1]), int(parts[2]), float(parts[3]))


@dataclass
class ExperimentConfig:
    hidden_sizes: list[int]
    activation: ActivationKind = Tanh
    lr_policy: LrPolicy = field(default_factory=LipschitzLR)
    data_path: Optional[str] = None
    synth: Optional[SynthSpec] = None
    n_landmark: Optional[int] = None
    epochs: int = 200
    iterations_per_epoch: int = 100
    batch_size: int = 200
    subsample_size: Optional[int] = None
    subsample_count: int = 6
    seed: int = 0
    out_dir: Optional[str] = None

    def __post_init__(self):
        if (self.data_path is None) == (self.synth is None):
            raise ParameterError("give exactly one of data_path or synth")
        if self.data_path is not None and self.n_landmark is None:
            raise ParameterError("n_landmark is required with data_path")
        for name in ("epochs", "iterations_per_epoch", "batch_size", "subsample_count"):
            if getattr(self, name) < 1:
                raise ParameterError(f"{name} must be at least 1")
        if self.subsample_size is not None and self.subsample_size < 2:
            raise ParameterError("subsample_size must be at least 2 for a train/test split")
        if any(h < 1 for h in self.hidden_sizes):
            raise ParameterError(f"hidden sizes must be positive, got {self.hidden_sizes}")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["activation"] = self.activation.describe()
        out["lr_policy"] = {"name": self.lr_policy.name, **asdict(self.lr_policy)}
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentConfig":
        obj = dict(obj)
        obj["activation"] = ActivationKind(**obj["activation"])
        policy = dict(obj["lr_policy"])
        kind = {"fixed": FixedLR, "decay": DecayLR, "lalr": LipschitzLR}[policy.pop("name")]
        obj["lr_policy"] = kind(**policy)
        if obj.get("synth") is not None:
            obj["synth"] = SynthSpec(**obj["synth"])
        obj["hidden_sizes"] = list(obj["hidden_sizes"])
        return cls(**obj)


@dataclass(frozen=True)
class EpochRecord:
    subsample: int
    epoch: int
    lr: float
    train_mse: float
    test_mae: float


@dataclass
class MetricsLog:
    records: list[EpochRecord] = field(default_factory=list)
    final_mae: list[float] = field(default_factory=list)
    best_mae: list[float] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    wall_clock: float = 0.0
    fallbacks: int = 0

    def summary(self) -> tuple[float, float]:
        return aggregate(self.final_mae)


def aggregate(values) -> tuple[float, float]:
    """Mean and population standard deviation."""
    arr = np.asarray(list(values), dtype=np.float64)
    if arr.size == 0:
        raise ParameterError("cannot aggregate an empty list")
    mean = float(arr.mean())
    return mean, float(np.sqrt(np.mean((arr - mean) ** 2)))


class _RateTracker:
    """Produces the learning rate for each step and remembers the last one."""

    def __init__(self, policy: LrPolicy, epochs: int):
        self.policy = policy
        self.epochs = epochs
        self.previous: Optional[float] = None
        self.fallbacks = 0

    def epoch_rate(self, epoch: int) -> Optional[float]:
        p = self.policy
        if isinstance(p, FixedLR):
            return p.eta
        if isinstance(p, DecayLR):
            return decay_lr(epoch, self.epochs, p.eta_max, p.eta_min)
        return None

    def lipschitz_rate(self, cache, y) -> float:
        try:
            lr = lipschitz_lr(compute_constants(cache, y), self.policy.scale)
        except DegenerateConstantError:
            self.fallbacks += 1
            lr = self.previous if self.previous is not None else self.policy.fallback
        self.previous = lr
        return lr


def train_network(net: Network, train: Dataset, test: Dataset, cfg: ExperimentConfig,
                  rng: np.random.Generator, subsample_index: int = 0):
    """Train ``net`` in place; returns (records, fallback count)."""
    policy = cfg.lr_policy
    tracker = _RateTracker(policy, cfg.epochs)
    lipschitz = isinstance(policy, LipschitzLR)
    per_batch = lipschitz and policy.granularity == PER_BATCH
    batch = min(cfg.batch_size, train.m)
    records = []
    for epoch in range(cfg.epochs):
        lr = tracker.epoch_rate(epoch)
        epoch_lr = lr
        for it in range(cfg.iterations_per_epoch):
            try:
                rows = rng.choice(train.m, size=batch, replace=False)
                xb, yb = train.x[rows], train.y[rows]
                cache = forward(net, xb)
                if lipschitz and (per_batch or it == 0):
                    lr = tracker.lipschitz_rate(cache, yb)
                if it == 0:
                    epoch_lr = lr
                sgd_step(net, backward(net, cache, yb), lr)
            except LalrError as exc:
                raise RunError(exc, subsample_index, epoch, it) from exc
        train_pred = predict(net, train.x)
        if not np.isfinite(train_pred).all():
            raise RunError(FloatingPointError("training diverged to non-finite outputs"),
                           subsample_index, epoch)
        records.append(EpochRecord(subsample_index, epoch, float(epoch_lr),
                                   mse_loss(train_pred, train.y), mae(predict(net, test.x), test.y)))
    return records, tracker.fallbacks


def load_dataset(cfg: ExperimentConfig) -> Dataset:
    if cfg.data_path is not None:
        return load_csv(cfg.data_path, cfg.n_landmark)
    s = cfg.synth
    return synth_regression(s.m, s.d_in, s.d_out, s.noise_sd, cfg.seed)


def split_half(rows, rng: np.random.Generator):
    """Shuffle ``rows`` and cut them into equal train and test halves."""
    perm = rng.permutation(np.asarray(rows))
    half = len(perm) // 2
    return np.sort(perm[:half]), np.sort(perm[half:])


def run_experiment(cfg: ExperimentConfig) -> MetricsLog:
    start = time.perf_counter()
    data = load_dataset(cfg)
    size = cfg.subsample_size if cfg.subsample_size is not None else min(20000, data.m)
    plan = subsample(data, size, cfg.subsample_count, cfg.seed)
    out = MetricsLog(config=cfg.to_dict())
    sizes = [data.x.shape[1], *cfg.hidden_sizes, data.y.shape[1]]
    for s, rows in enumerate(plan.indices):
        train_rows, test_rows = split_half(rows, np.random.default_rng([cfg.seed, s, 0]))
        train, test = data.take(train_rows), data.take(test_rows)
        net = init_network(sizes, cfg.activation, cfg.seed + s)
        records, fallbacks = train_network(net, train, test, cfg,
                                           np.random.default_rng([cfg.seed, s, 1]), s)
        out.records.extend(records)
        out.fallbacks += fallbacks
        out.final_mae.append(records[-1].test_mae)
        out.best_mae.append(min(r.test_mae for r in records))
        log.info("subsample %d: final MAE %.6f, best %.6f", s, out.final_mae[-1], out.best_mae[-1])
    out.wall_clock = time.perf_counter() - start
    return out


def _fmt(v: float) -> str:
    return repr(float(v))


def emit_outputs(metrics: MetricsLog, out_dir) -> dict[str, Path]:
    """Write metrics.csv, lr_curve.csv and summary.json into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {name: out_dir / name for name in ("metrics.csv", "lr_curve.csv", "summary.json")}

    with paths["metrics.csv"].open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(METRICS_HEADER)
        for r in metrics.records:
            w.writerow([r.epoch, r.subsample, _fmt(r.lr), _fmt(r.train_mse), _fmt(r.test_mae)])

    subsamples = sorted({r.subsample for r in metrics.records})
    by_epoch: dict[int, dict[int, float]] = {}
    for r in metrics.records:
        by_epoch.setdefault(r.epoch, {})[r.subsample] = r.lr
    with paths["lr_curve.csv"].open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["epoch", *(f"lr_subsample_{s}" for s in subsamples)])
        for epoch in sorted(by_epoch):
            w.writerow([epoch, *(_fmt(by_epoch[epoch][s]) for s in subsamples)])

    summary = {"config": metrics.config, "wall_clock_seconds": metrics.wall_clock,
               "fallbacks": metrics.fallbacks, "final_mae": metrics.final_mae,
               "best_mae": metrics.best_mae}
    if metrics.final_mae:
        summary["mean_mae"], summary["sigma"] = aggregate(metrics.final_mae)
        summary["mean_best_mae"], summary["sigma_best"] = aggregate(metrics.best_mae)
    paths["summary.json"].write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return paths
