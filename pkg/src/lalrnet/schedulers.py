"""Learning-rate policies: fixed, linear decay, and the Lipschitz adaptive rate.

The adaptive rate is the reciprocal of a bound on the largest last-layer
weight gradient of the 1/(2m) mean-square loss,

    L = (K_a + ||y||) * K_z / m

where K_a is the Frobenius norm of the network output over the batch,
||y|| the Frobenius norm of the batch targets and K_z the largest column
norm of the penultimate activations. ``scale / L`` is used as the step.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import DegenerateConstantError, ParameterError
from .linalg import Matrix, column_norms, frob, matmul
from .network import ForwardCache

DEFAULT_FIXED_LR = 5e-7
DEFAULT_DECAY_MAX = 5e-4
DEFAULT_DECAY_MIN = 1e-5
DEFAULT_LALR_SCALE = 0.3

PER_EPOCH = "epoch"
PER_BATCH = "batch"


@dataclass(frozen=True)
class FixedLR:
    eta: float = DEFAULT_FIXED_LR

    def __post_init__(self):
        if not self.eta > 0:
            raise ParameterError(f"fixed learning rate must be positive, got {self.eta}")

    name = "fixed"


@dataclass(frozen=True)
class DecayLR:
    eta_max: float = DEFAULT_DECAY_MAX
    eta_min: float = DEFAULT_DECAY_MIN

    def __post_init__(self):
        if not (self.eta_min > 0 and self.eta_max > 0):
            raise ParameterError("decay bounds must be positive")
        if self.eta_min > self.eta_max:
            raise ParameterError(f"eta_min {self.eta_min} exceeds eta_max {self.eta_max}")

    name = "decay"


@dataclass(frozen=True)
class LipschitzLR:
    scale: float = DEFAULT_LALR_SCALE
    granularity: str = PER_EPOCH
    # Used when the very first constant is degenerate and no earlier rate exists.
    fallback: float = DEFAULT_DECAY_MIN

    def __post_init__(self):
        if not 0 < self.scale <= 1:
            raise ParameterError(f"scale must lie in (0, 1], got {self.scale}")
        if self.granularity not in (PER_EPOCH, PER_BATCH):
            raise ParameterError(f"granularity must be {PER_EPOCH!r} or {PER_BATCH!r}")
        if not self.fallback > 0:
            raise ParameterError("fallback rate must be positive")

    name = "lalr"


LrPolicy = Union[FixedLR, DecayLR, LipschitzLR]


@dataclass(frozen=True)
class LipschitzConstants:
    K_a: float
    K_z: float
    y_norm: float
    m: int

    @property
    def L(self) -> float:
        return (self.K_a + self.y_norm) * self.K_z / self.m


def compute_constants(cache: ForwardCache, y: Matrix) -> LipschitzConstants:
    out = cache.output
    if out.shape[0] == 0:
        raise ParameterError("cannot compute constants on an empty batch")
    if len(cache.a) < 2:
        raise ParameterError("cache has no penultimate activations")
    return LipschitzConstants(
        K_a=frob(out),
        K_z=float(column_norms(cache.penultimate).max()),
        y_norm=frob(y),
        m=out.shape[0],
    )


def lipschitz_lr(c: LipschitzConstants, scale: float = DEFAULT_LALR_SCALE) -> float:
    L = c.L
    if not L > 0:
        raise DegenerateConstantError(f"Lipschitz constant is {L}; constants {c}")
    return scale / L


def decay_lr(epoch: int, total_epochs: int, eta_max: float = DEFAULT_DECAY_MAX,
             eta_min: float = DEFAULT_DECAY_MIN) -> float:
    """Linear interpolation from eta_max at epoch 0 to eta_min at the last epoch."""
    if total_epochs < 2:
        return eta_max
    if not 0 <= epoch < total_epochs:
        raise ParameterError(f"epoch {epoch} outside [0, {total_epochs})")
    if eta_min > eta_max:
        raise ParameterError(f"eta_min {eta_min} exceeds eta_max {eta_max}")
    return eta_max + (eta_min - eta_max) * epoch / (total_epochs - 1)


def fixed_lr(eta: float = DEFAULT_FIXED_LR) -> float:
    if not eta > 0:
        raise ParameterError(f"fixed learning rate must be positive, got {eta}")
    return eta


def linreg_lipschitz(x: Matrix, y: Matrix, k_bound: float) -> float:
    """Lipschitz constant of the 1/(2m) least-squares loss of a linear model.

    Valid for weight vectors whose norm is at most ``k_bound``:
    (k_bound/m)*||X^T X|| + (1/m)*||y^T X||, with Frobenius matrix norms.
    """
    m = x.shape[0]
    if m == 0:
        raise ParameterError("linear-regression constant needs at least one row")
    return k_bound / m * frob(matmul(x.T, x)) + frob(matmul(y.T, x)) / m
