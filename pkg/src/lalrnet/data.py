"""Dataset loading, range normalisation, sub-sampling and a synthetic task."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ParameterError, ParseError, SchemaError, ShapeError
from .linalg import Matrix


@dataclass(frozen=True)
class Dataset:
    """Landmark inputs ``x`` and target outputs ``y``, one example per row."""
    x: Matrix
    y: Matrix
    feature_names: Optional[list[str]] = None

    def __post_init__(self):
        if self.x.ndim != 2 or self.y.ndim != 2:
            raise ShapeError("x and y must be 2-D")
        if self.x.shape[0] != self.y.shape[0]:
            raise ShapeError(f"x has {self.x.shape[0]} rows but y has {self.y.shape[0]}")
        if self.x.shape[1] < 1 or self.y.shape[1] < 1:
            raise ShapeError("need at least one landmark and one target column")
        if not (np.isfinite(self.x).all() and np.isfinite(self.y).all()):
            raise ValueError("dataset contains non-finite values")

    @property
    def m(self) -> int:
        return self.x.shape[0]

    def take(self, rows) -> "Dataset":
        rows = np.asarray(rows, dtype=np.intp)
        return Dataset(self.x[rows], self.y[rows], self.feature_names)


def load_csv(path, n_landmark: int) -> Dataset:
    """Read a headed CSV whose first ``n_landmark`` columns are the inputs."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file is empty, expected a header row") from None
        n_cols = len(header)
        if n_landmark < 1 or n_landmark >= n_cols:
            raise SchemaError(
                f"{path}: {n_cols} columns cannot hold {n_landmark} landmark columns plus a target block")
        rows = []
        for r, record in enumerate(reader, start=1):
            if not record:
                continue
            if len(record) != n_cols:
                raise SchemaError(f"{path}: row {r} has {len(record)} cells, header has {n_cols}")
            values = []
            for c, cell in enumerate(record):
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(f"{path}: row {r}, column {c}: not a number: {cell!r}", r, c) from None
                if not math.isfinite(v):
                    raise ParseError(f"{path}: row {r}, column {c}: non-finite value {cell!r}", r, c)
                values.append(v)
            rows.append(values)
    data = np.array(rows, dtype=np.float64).reshape(len(rows), n_cols)
    return Dataset(data[:, :n_landmark], data[:, n_landmark:], header)


def write_csv(d: Dataset, path) -> None:
    names = d.feature_names
    if names is None:
        names = [f"x{i}" for i in range(d.x.shape[1])] + [f"y{j}" for j in range(d.y.shape[1])]
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        # repr gives the shortest string that round-trips to the same double
        for row in np.hstack([d.x, d.y]):
            w.writerow([repr(float(v)) for v in row])


def _rescale(m: Matrix, lo: float, hi: float) -> Matrix:
    cmin = m.min(axis=0)
    cmax = m.max(axis=0)
    span = cmax - cmin
    out = np.empty_like(m)
    flat = span == 0
    live = ~flat
    out[:, live] = lo + (m[:, live] - cmin[live]) / span[live] * (hi - lo)
    out[:, live] = np.clip(out[:, live], lo, hi)
    out[:, flat] = 0.5 * (lo + hi)
    return out


def normalize_range(d: Dataset, lo: float = 4.0, hi: float = 15.0) -> Dataset:
    """Map every column affinely onto [lo, hi]; constant columns go to the midpoint."""
    if not lo < hi:
        raise ParameterError(f"need lo < hi, got [{lo}, {hi}]")
    if d.m == 0:
        return d
    return Dataset(_rescale(d.x, lo, hi), _rescale(d.y, lo, hi), d.feature_names)


@dataclass(frozen=True)
class SubsamplePlan:
    count: int
    size: int
    seed: int
    indices: list[list[int]] = field(repr=False)

    def to_json(self) -> str:
        return json.dumps({"count": self.count, "size": self.size, "seed": self.seed,
                           "indices": self.indices})

    @classmethod
    def from_json(cls, text: str) -> "SubsamplePlan":
        obj = json.loads(text)
        return cls(int(obj["count"]), int(obj["size"]), int(obj["seed"]),
                   [[int(i) for i in row] for row in obj["indices"]])


def subsample(d: Dataset, size: int, count: int, seed: int) -> SubsamplePlan:
    """Draw ``count`` independent row sets of ``size`` distinct rows each.

    Different draws may share rows.
    """
    if count < 1:
        raise ParameterError(f"count must be at least 1, got {count}")
    if not 1 <= size <= d.m:
        raise ParameterError(f"subsample size {size} outside [1, {d.m}]")
    rng = np.random.default_rng(seed)
    indices = [sorted(rng.choice(d.m, size=size, replace=False).tolist()) for _ in range(count)]
    return SubsamplePlan(count, size, seed, indices)


SYNTH_LO, SYNTH_HI = 4.0, 15.0


def synth_mixing(d_in: int, d_out: int, seed: int) -> tuple[Matrix, Matrix]:
    """The linear and sinusoidal mixing matrices used by ``synth_regression``.

    The sinusoid's projection is scaled so its phase has unit standard
    deviation over the input distribution; larger phases turn the sine into
    noise no model can fit.
    """
    rng = np.random.default_rng(seed)
    x_sd = (SYNTH_HI - SYNTH_LO) / np.sqrt(12.0)
    w = rng.normal(0.0, 1.0 / np.sqrt(d_in), size=(d_in, d_out))
    v = rng.normal(0.0, 1.0 / (np.sqrt(d_in) * x_sd), size=(d_in, d_out))
    return w, v


def synth_targets(x: Matrix, w: Matrix, v: Matrix) -> Matrix:
    return x @ w + np.sin(x @ v)


def synth_regression(m: int, d_in: int, d_out: int, noise_sd: float = 0.0, seed: int = 0) -> Dataset:
    """Inputs uniform on [4, 15]; targets ``x W + sin(x V)`` plus Gaussian noise."""
    if m < 1 or d_in < 1 or d_out < 1:
        raise ParameterError(f"dimensions must be positive, got m={m}, d_in={d_in}, d_out={d_out}")
    if noise_sd < 0:
        raise ParameterError(f"noise_sd must be non-negative, got {noise_sd}")
    w, v = synth_mixing(d_in, d_out, seed)
    rng = np.random.default_rng([seed, 1])
    x = rng.uniform(SYNTH_LO, SYNTH_HI, size=(m, d_in))
    y = synth_targets(x, w, v)
    if noise_sd > 0:
        y = y + rng.normal(0.0, noise_sd, size=y.shape)
    return Dataset(x, y)
