"""Oracles and random-case generators shared by the test modules."""
import numpy as np

from lalrnet.activations import ActivationKind
from lalrnet.network import forward, init_network, mse_loss


def numeric_gradients(net, x, y, h=1e-6):
    """Central differences of the loss w.r.t. every weight and bias, flattened
    in the same order as ``Gradients.flat``."""
    out = []
    for layer in net.layers:
        for param in (layer.weights, layer.biases):
            g = np.empty_like(param)
            for idx in np.ndindex(param.shape):
                keep = param[idx]
                param[idx] = keep + h
                up = mse_loss(forward(net, x).output, y)
                param[idx] = keep - h
                down = mse_loss(forward(net, x).output, y)
                param[idx] = keep
                g[idx] = (up - down) / (2 * h)
            out.append(g.ravel())
    return np.concatenate(out)


def relative_error(analytic, numeric):
    denom = max(np.linalg.norm(analytic), np.linalg.norm(numeric))
    if denom == 0:
        return 0.0
    return float(np.linalg.norm(analytic - numeric) / denom)


def random_case(rng, activation: ActivationKind, max_depth=3, widths=(2, 8), batch=(1, 32), min_depth=1):
    """A random net (min_depth..max_depth layers, widths in ``widths``) and a Gaussian batch."""
    depth = int(rng.integers(min_depth, max_depth + 1))
    sizes = [int(s) for s in rng.integers(widths[0], widths[1] + 1, size=depth + 1)]
    net = init_network(sizes, activation, int(rng.integers(2**31)))
    for layer in net.layers:
        layer.biases[:] = rng.normal(0, 0.1, size=layer.biases.shape)
    m = int(rng.integers(batch[0], batch[1] + 1))
    x = rng.normal(size=(m, sizes[0]))
    y = rng.normal(size=(m, sizes[-1]))
    return net, x, y


def min_hidden_preactivation(net, x):
    cache = forward(net, x)
    hidden = cache.z[:-1]
    return min((np.abs(z).min() for z in hidden), default=np.inf)


def brute_force_fit(x_lo, x_hi, grid_size, cells):
    """Independent oracle: plain double loop over the (k, n) cell centres."""
    xs = [x_lo + (x_hi - x_lo) * i / (grid_size - 1) for i in range(grid_size)] if grid_size > 1 else [x_lo]
    xs = np.array(xs)
    best = (np.inf, -1, -1)
    for i in range(cells):
        k = (i + 1) / (cells + 1)
        for j in range(cells):
            n = 1 + (j + 1) / (cells + 1)
            r = k * xs ** n - xs
            err = float(np.sum(r * r))
            if err < best[0]:
                best = (err, i, j)
    return best
