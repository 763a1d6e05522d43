"""Dense feedforward regression network with hand-written backpropagation."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .activations import LINEAR, ActivationKind, Linear, activate, derivative
from .errors import ContractError, ParameterError, ShapeError
from .linalg import Matrix, matmul

_network_ids = itertools.count()


@dataclass
class DenseLayer:
    weights: Matrix  # (fan_in, fan_out)
    biases: Matrix  # (1, fan_out)
    activation: ActivationKind

    @property
    def fan_in(self) -> int:
        return self.weights.shape[0]

    @property
    def fan_out(self) -> int:
        return self.weights.shape[1]


@dataclass
class Network:
    layers: list[DenseLayer]
    uid: int = field(default_factory=lambda: next(_network_ids))
    version: int = 0

    def __post_init__(self):
        if not self.layers:
            raise ParameterError("a network needs at least one layer")
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if prev.fan_out != nxt.fan_in:
                raise ShapeError(f"layer widths do not chain: {prev.weights.shape} then {nxt.weights.shape}")
        for layer in self.layers:
            if layer.biases.shape != (1, layer.fan_out):
                raise ShapeError(f"bias shape {layer.biases.shape} does not match weights {layer.weights.shape}")
            if not np.isfinite(layer.weights).all():
                raise ValueError("non-finite weights")
        if self.layers[-1].activation.tag != LINEAR:
            raise ParameterError("the output layer must be linear")

    @property
    def input_width(self) -> int:
        return self.layers[0].fan_in

    @property
    def output_width(self) -> int:
        return self.layers[-1].fan_out

    def copy(self) -> "Network":
        layers = [DenseLayer(l.weights.copy(), l.biases.copy(), l.activation) for l in self.layers]
        return Network(layers)


@dataclass
class ForwardCache:
    """Pre-activations ``z[l]`` and activations ``a[l]`` for one batch.

    ``a[0]`` is the batch input, so ``len(a) == len(z) + 1``.
    """
    z: list[Matrix]
    a: list[Matrix]
    net_uid: int
    net_version: int

    @property
    def output(self) -> Matrix:
        return self.a[-1]

    @property
    def penultimate(self) -> Matrix:
        return self.a[-2]


@dataclass
class Gradients:
    dW: list[Matrix]
    db: list[Matrix]

    def flat(self) -> np.ndarray:
        return np.concatenate([g.ravel() for pair in zip(self.dW, self.db) for g in pair])


def init_network(layer_sizes, hidden_activation: ActivationKind, seed: int) -> Network:
    """Glorot-uniform weights, zero biases, linear output layer."""
    sizes = list(layer_sizes)
    if len(sizes) < 2:
        raise ParameterError(f"need at least input and output sizes, got {sizes}")
    if any(int(s) != s or s < 1 for s in sizes):
        raise ParameterError(f"layer sizes must be positive integers, got {sizes}")
    rng = np.random.default_rng(seed)
    layers = []
    for idx, (fan_in, fan_out) in enumerate(zip(sizes, sizes[1:])):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        w = rng.uniform(-limit, limit, size=(fan_in, fan_out))
        act = Linear if idx == len(sizes) - 2 else hidden_activation
        layers.append(DenseLayer(w, np.zeros((1, fan_out)), act))
    return Network(layers)


def forward(net: Network, x: Matrix) -> ForwardCache:
    if x.ndim != 2 or x.shape[1] != net.input_width:
        raise ShapeError(f"input of shape {x.shape} does not match network input width {net.input_width}")
    zs, acts = [], [x]
    a = x
    for layer in net.layers:
        z = matmul(a, layer.weights) + layer.biases
        a = activate(layer.activation, z)
        zs.append(z)
        acts.append(a)
    return ForwardCache(zs, acts, net.uid, net.version)


def predict(net: Network, x: Matrix) -> Matrix:
    return forward(net, x).output


def _check_same_shape(pred, y):
    if pred.shape != y.shape:
        raise ShapeError(f"prediction shape {pred.shape} != target shape {y.shape}")


def mse_loss(pred: Matrix, y: Matrix) -> float:
    """Squared error summed over all entries, divided by twice the row count."""
    _check_same_shape(pred, y)
    r = (pred - y).ravel()
    return float(np.dot(r, r)) / (2.0 * pred.shape[0])


def mae(pred: Matrix, y: Matrix) -> float:
    _check_same_shape(pred, y)
    return float(np.mean(np.abs(pred - y)))


def backward(net: Network, cache: ForwardCache, y: Matrix) -> Gradients:
    """Gradients of ``mse_loss`` with respect to every weight and bias."""
    if cache.net_uid != net.uid or cache.net_version != net.version:
        raise ContractError("forward cache was not produced by the current state of this network")
    if len(cache.z) != len(net.layers):
        raise ContractError(f"cache has {len(cache.z)} layers, network has {len(net.layers)}")
    _check_same_shape(cache.output, y)
    m = y.shape[0]
    n_layers = len(net.layers)
    dW = [None] * n_layers
    db = [None] * n_layers
    delta = (cache.output - y) / m
    for l in range(n_layers - 1, -1, -1):
        layer = net.layers[l]
        if layer.activation.tag != LINEAR:
            delta = delta * derivative(layer.activation, cache.z[l])
        dW[l] = matmul(cache.a[l].T, delta)
        db[l] = delta.sum(axis=0, keepdims=True)
        if l:
            delta = matmul(delta, layer.weights.T)
    return Gradients(dW, db)


def sgd_step(net: Network, grads: Gradients, lr: float) -> Network:
    """Update ``net`` in place with plain gradient descent and return it."""
    if not lr > 0:
        raise ParameterError(f"learning rate must be positive, got {lr}")
    if len(grads.dW) != len(net.layers):
        raise ShapeError("gradients do not mirror the network")
    for layer, gw, gb in zip(net.layers, grads.dW, grads.db):
        if gw.shape != layer.weights.shape or gb.shape != layer.biases.shape:
            raise ShapeError(f"gradient shapes {gw.shape}/{gb.shape} do not match layer {layer.weights.shape}")
    for layer, gw, gb in zip(net.layers, grads.dW, grads.db):
        layer.weights -= lr * gw
        layer.biases -= lr * gb
    net.version += 1
    return net
