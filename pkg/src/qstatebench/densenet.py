"""Small fully-connected network with ReLU hidden layers, a linear output
layer, and hand-written backpropagation."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from qstatebench.errors import ConfigError, InvalidInputError


class DenseNet:
    def __init__(self, layer_sizes, weights, biases):
        self.layer_sizes = [int(n) for n in layer_sizes]
        self.weights = [np.asarray(w, dtype=float) for w in weights]
        self.biases = [np.asarray(b, dtype=float) for b in biases]
        for k, (n_in, n_out) in enumerate(zip(self.layer_sizes[:-1], self.layer_sizes[1:])):
            if self.weights[k].shape != (n_out, n_in) or self.biases[k].shape != (n_out,):
                raise ConfigError(f"layer {k} parameter shapes do not match {layer_sizes}")

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def parameters(self) -> list[np.ndarray]:
        return self.weights + self.biases

    def __call__(self, x) -> np.ndarray:
        return net_forward(self, x)

    def to_record(self) -> dict:
        return {
            "layer_sizes": self.layer_sizes,
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_record(cls, rec: dict) -> DenseNet:
        return cls(rec["layer_sizes"], rec["weights"], rec["biases"])

    def dumps(self) -> str:
        return json.dumps(self.to_record())

    @classmethod
    def loads(cls, text: str) -> DenseNet:
        return cls.from_record(json.loads(text))


@dataclass
class GradientBundle:
    weights: list[np.ndarray]
    biases: list[np.ndarray]


def net_init(layer_sizes, rng: np.random.Generator) -> DenseNet:
    """Glorot-uniform weights, zero biases."""
    sizes = list(layer_sizes)
    if len(sizes) < 2 or any(int(n) < 1 for n in sizes):
        raise ConfigError(f"need at least two positive layer sizes, got {sizes}")
    weights, biases = [], []
    for n_in, n_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (n_in + n_out))
        weights.append(rng.uniform(-limit, limit, size=(n_out, n_in)))
        biases.append(np.zeros(n_out))
    return DenseNet(sizes, weights, biases)


def _check_input(net: DenseNet, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (net.layer_sizes[0],):
        raise InvalidInputError(f"expected input of width {net.layer_sizes[0]}, got {x.shape}")
    return x


def net_forward(net: DenseNet, x) -> np.ndarray:
    a = _check_input(net, x)
    last = net.n_layers - 1
    for k, (w, b) in enumerate(zip(net.weights, net.biases)):
        a = w @ a + b
        if k < last:
            a = np.maximum(a, 0.0)
    return a


def net_loss(net: DenseNet, x, action_index: int, td_target: float) -> float:
    return float((td_target - net_forward(net, x)[action_index]) ** 2)


def net_gradients(net: DenseNet, x, action_index: int, td_target: float):
    """Squared error on one output and its gradient w.r.t. every parameter."""
    a = _check_input(net, x)
    acts = [a]
    last = net.n_layers - 1
    for k, (w, b) in enumerate(zip(net.weights, net.biases)):
        a = w @ a + b
        if k < last:
            a = np.maximum(a, 0.0)
        acts.append(a)
    err = acts[-1][action_index] - td_target
    delta = np.zeros_like(acts[-1])
    delta[action_index] = 2.0 * err
    gw = [None] * net.n_layers
    gb = [None] * net.n_layers
    for k in range(last, -1, -1):
        gw[k] = np.outer(delta, acts[k])
        gb[k] = delta
        if k > 0:
            # relu'(z) = 1 where the stored activation is positive
            delta = (net.weights[k].T @ delta) * (acts[k] > 0)
    return float(err * err), GradientBundle(gw, gb)


def net_train_step(net: DenseNet, x, action_index: int, td_target: float, learn_rate: float) -> float:
    """One plain gradient step on (td_target - Q(x)[action])^2; returns the pre-update loss.

    Same arithmetic as applying :func:`net_gradients`, but only the chosen
    output row of the last layer is touched.
    """
    a = _check_input(net, x)
    ws, bs = net.weights, net.biases
    acts = [a]
    for w, b in zip(ws[:-1], bs[:-1]):
        a = w @ a + b
        np.maximum(a, 0.0, out=a)
        acts.append(a)
    w_out = ws[-1]
    # full output layer, so the error agrees bitwise with net_forward
    err = float((w_out @ a + bs[-1])[action_index]) - td_target
    loss = err * err
    if learn_rate == 0.0 or err == 0.0:
        return loss
    d = 2.0 * err
    delta = w_out[action_index] * d
    w_out[action_index] -= (learn_rate * d) * a
    bs[-1][action_index] -= learn_rate * d
    for k in range(len(ws) - 2, -1, -1):
        delta = delta * (acts[k + 1] > 0)
        if k > 0:
            nxt = ws[k].T @ delta
        ws[k] -= learn_rate * (delta[:, None] * acts[k][None, :])
        bs[k] -= learn_rate * delta
        if k > 0:
            delta = nxt
    return loss


def net_forward_batch(net: DenseNet, xs: np.ndarray) -> np.ndarray:
    """Row-wise forward pass for a (batch, width) array."""
    a = np.asarray(xs, dtype=float)
    last = net.n_layers - 1
    for k, (w, b) in enumerate(zip(net.weights, net.biases)):
        a = a @ w.T + b
        if k < last:
            a = np.maximum(a, 0.0)
    return a


def net_clone(net: DenseNet) -> DenseNet:
    return DenseNet(
        net.layer_sizes,
        [w.copy() for w in net.weights],
        [b.copy() for b in net.biases],
    )
