"""Activation functions, their analytic derivatives, and the A-ReLU fit.

All functions accept a scalar or an array and return the same kind.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.special import expit

from .errors import DomainError, ParameterError

SIGMOID = "sigmoid"
TANH = "tanh"
RELU = "relu"
ARELU = "arelu"
SBAF = "sbaf"
LINEAR = "linear"

TAGS = (SIGMOID, TANH, RELU, ARELU, SBAF, LINEAR)


@dataclass(frozen=True)
class ActivationKind:
    tag: str
    k: Optional[float] = None
    n: Optional[float] = None
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ParameterError(f"unknown activation {self.tag!r}; expected one of {TAGS}")
        if self.tag == ARELU:
            if self.k is None or self.n is None:
                raise ParameterError("arelu needs both k and n")
            if not (0 < self.k < 1 and 1 < self.n < 2):
                raise ParameterError(f"arelu requires 0<k<1 and 1<n<2, got k={self.k}, n={self.n}")
        elif self.tag == SBAF:
            if self.k is None or self.alpha is None:
                raise ParameterError("sbaf needs both k and alpha")
            # alpha == 1 is admitted: it is the 1/(1+kx) member of the family.
            if not (self.k > 0 and 0 < self.alpha <= 1):
                raise ParameterError(f"sbaf requires k>0 and 0<alpha<=1, got k={self.k}, alpha={self.alpha}")

    @classmethod
    def arelu(cls, k: float = 0.6, n: float = 1.2) -> "ActivationKind":
        return cls(ARELU, k=k, n=n)

    @classmethod
    def sbaf(cls, k: float = 1.0, alpha: float = 0.5) -> "ActivationKind":
        return cls(SBAF, k=k, alpha=alpha)

    @property
    def smooth(self) -> bool:
        """False for activations with a kink at zero."""
        return self.tag not in (RELU, ARELU)

    def describe(self) -> dict:
        out = {"tag": self.tag}
        for name in ("k", "n", "alpha"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out


Sigmoid = ActivationKind(SIGMOID)
Tanh = ActivationKind(TANH)
ReLU = ActivationKind(RELU)
Linear = ActivationKind(LINEAR)


def _check_sbaf_domain(x, closed):
    x = np.asarray(x)
    ok = (x >= 0) & (x <= 1) if closed else (x > 0) & (x < 1)
    if not np.all(ok):
        interval = "[0, 1]" if closed else "(0, 1)"
        raise DomainError(f"sbaf is only defined for inputs in {interval}")


def _scalar_like(x, out):
    return float(out) if np.ndim(x) == 0 else out


def activate(kind: ActivationKind, x):
    xa = np.asarray(x, dtype=np.float64)
    tag = kind.tag
    if tag == SIGMOID:
        out = expit(xa)
    elif tag == TANH:
        out = np.tanh(xa)
    elif tag == RELU:
        out = np.maximum(xa, 0.0)
    elif tag == ARELU:
        out = np.where(xa >= 0, kind.k * np.power(np.maximum(xa, 0.0), kind.n), 0.0)
    elif tag == SBAF:
        _check_sbaf_domain(xa, closed=True)
        a = kind.alpha
        out = 1.0 / (1.0 + kind.k * np.power(xa, a) * np.power(1.0 - xa, 1.0 - a))
    else:
        out = xa.copy()
    return _scalar_like(x, out)


def derivative(kind: ActivationKind, x):
    """Analytic derivative of ``activate(kind, .)``.

    ReLU and A-ReLU return 0 at exactly x = 0. For A-ReLU this is the true
    limit since n > 1; for ReLU it is the usual subgradient choice.
    """
    xa = np.asarray(x, dtype=np.float64)
    tag = kind.tag
    if tag == SIGMOID:
        s = expit(xa)
        out = s * (1.0 - s)
    elif tag == TANH:
        t = np.tanh(xa)
        out = 1.0 - t * t
    elif tag == RELU:
        out = (xa > 0).astype(np.float64)
    elif tag == ARELU:
        pos = np.maximum(xa, 0.0)
        out = np.where(xa > 0, kind.k * kind.n * np.power(pos, kind.n - 1.0), 0.0)
    elif tag == SBAF:
        _check_sbaf_domain(xa, closed=False)
        k, a = kind.k, kind.alpha
        g = np.power(xa, a) * np.power(1.0 - xa, 1.0 - a)
        dg = g * (a / xa - (1.0 - a) / (1.0 - xa))
        out = -k * dg / (1.0 + k * g) ** 2
    else:
        out = np.ones_like(xa)
    return _scalar_like(x, out)


class AReluFit(NamedTuple):
    k: float
    n: float
    error: float
    at_boundary: bool


def arelu_grid(cells: int) -> tuple[np.ndarray, np.ndarray]:
    """Cell centres covering the open box 0<k<1, 1<n<2."""
    steps = (np.arange(cells) + 1.0) / (cells + 1.0)
    return steps, 1.0 + steps


def arelu_objective(k: float, n: float, xs) -> float:
    """Least-squares distance between k*x**n and the identity on ``xs``."""
    xs = np.asarray(xs, dtype=np.float64)
    r = k * np.power(xs, n) - xs
    return float(np.dot(r, r))


def fit_arelu(x_lo: float = 0.01, x_hi: float = 1.0, grid_size: int = 100,
              cells: int = 500) -> AReluFit:
    """Grid-search the A-ReLU parameters that best match ReLU on (x_lo, x_hi).

    The search covers ``cells`` x ``cells`` points strictly inside
    0<k<1, 1<n<2 and minimises sum((k*x**n - x)**2) over ``grid_size``
    evenly spaced x. ``at_boundary`` is set when the minimiser sits on the
    outermost ring of the grid, i.e. the true optimum may lie outside.
    """
    if not x_lo > 0:
        raise ParameterError(f"x_lo must be positive, got {x_lo}")
    if x_hi < x_lo:
        raise ParameterError(f"empty search range [{x_lo}, {x_hi}]")
    if grid_size < 1 or cells < 1:
        raise ParameterError("grid_size and cells must be at least 1")
    xs = np.linspace(x_lo, x_hi, grid_size)
    ks, ns = arelu_grid(cells)
    powers = np.power(xs[None, :], ns[:, None])  # (cells, grid_size)
    errors = np.empty((cells, cells))
    for i, k in enumerate(ks):
        r = k * powers - xs
        errors[i] = np.einsum("ij,ij->i", r, r)
    i, j = np.unravel_index(np.argmin(errors), errors.shape)
    edge = cells - 1
    at_boundary = i in (0, edge) or j in (0, edge)
    return AReluFit(float(ks[i]), float(ns[j]), float(errors[i, j]), bool(at_boundary))
