"""Single-hidden-layer feed-forward networks encoded as flat parameter vectors.

Layout of a parameter vector (length ``N + B``)::

    [ W1 (n_hidden x n_in, row-major) | W2 (n_out x n_hidden, row-major) | b1 (n_hidden) | b2 (n_out) ]

i.e. all weights first, then all biases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from codeqnn.core import Bounds, Objective

ACTIVATIONS = ("logistic", "linear")


@dataclass(frozen=True)
class Topology:
    n_in: int
    n_hidden: int
    n_out: int
    hidden_activation: str = "logistic"
    output_activation: str = "linear"

    def __post_init__(self):
        if min(self.n_in, self.n_hidden, self.n_out) < 1:
            raise ValueError(f"layer sizes must be >= 1, got {self.n_in}-{self.n_hidden}-{self.n_out}")
        if self.hidden_activation != "logistic":
            raise ValueError(f"unsupported hidden activation {self.hidden_activation!r}")
        if self.output_activation not in ACTIVATIONS:
            raise ValueError(f"unsupported output activation {self.output_activation!r}")

    @property
    def n_weights(self) -> int:
        return self.n_in * self.n_hidden + self.n_hidden * self.n_out

    @property
    def n_biases(self) -> int:
        return self.n_hidden + self.n_out


def param_count(t: Topology) -> int:
    return t.n_weights + t.n_biases


@dataclass
class DecodedNetwork:
    W1: np.ndarray  # (n_hidden, n_in)
    b1: np.ndarray  # (n_hidden,)
    W2: np.ndarray  # (n_out, n_hidden)
    b2: np.ndarray  # (n_out,)
    topology: Topology


def decode(v: np.ndarray, t: Topology) -> DecodedNetwork:
    v = np.asarray(v, dtype=float)
    if v.shape != (param_count(t),):
        raise ValueError(f"length mismatch: topology needs {param_count(t)} parameters, got {v.shape}")
    a = t.n_hidden * t.n_in
    b = a + t.n_out * t.n_hidden
    c = b + t.n_hidden
    return DecodedNetwork(
        W1=v[:a].reshape(t.n_hidden, t.n_in),
        W2=v[a:b].reshape(t.n_out, t.n_hidden),
        b1=v[b:c],
        b2=v[c:],
        topology=t,
    )


def flatten(net: DecodedNetwork) -> np.ndarray:
    return np.concatenate([net.W1.ravel(), net.W2.ravel(), net.b1, net.b2])


def forward(net: DecodedNetwork, x: np.ndarray) -> np.ndarray:
    """Network output for one input vector or a batch (rows are samples)."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != net.topology.n_in:
        raise ValueError(f"dimension mismatch: network expects {net.topology.n_in} inputs, got {x.shape[-1]}")
    hidden = expit(x @ net.W1.T + net.b1)
    out = hidden @ net.W2.T + net.b2
    if net.topology.output_activation == "logistic":
        out = expit(out)
    return out


def _check_batch(t: Topology, X: np.ndarray, Y: np.ndarray | None = None):
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("empty dataset: need at least one sample row")
    if X.shape[1] != t.n_in:
        raise ValueError(f"dimension mismatch: X has {X.shape[1]} columns, topology expects {t.n_in}")
    if Y is not None:
        if Y.shape[0] != X.shape[0]:
            raise ValueError(f"dimension mismatch: {X.shape[0]} input rows vs {Y.shape[0]} target rows")
        if Y.shape[1] != t.n_out:
            raise ValueError(f"dimension mismatch: Y has {Y.shape[1]} columns, topology expects {t.n_out}")


def mse_fitness(v: np.ndarray, t: Topology, X: np.ndarray, Y: np.ndarray) -> float:
    """Mean over samples of the squared error summed over output units."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float).reshape(len(X), -1) if np.ndim(Y) == 1 else np.asarray(Y, dtype=float)
    _check_batch(t, X, Y)
    err = forward(decode(v, t), X) - Y
    return float(np.einsum("ij,ij->", err, err) / X.shape[0])


def accuracy(v: np.ndarray, t: Topology, X: np.ndarray, labels: np.ndarray) -> float:
    if t.n_out < 2:
        raise ValueError("accuracy needs at least two output units")
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels)
    _check_batch(t, X)
    if labels.shape != (X.shape[0],):
        raise ValueError("dimension mismatch: one label per sample row required")
    pred = np.argmax(forward(decode(v, t), X), axis=1)
    return float(np.mean(pred == labels))


class NetworkObjective(Objective):
    """Training-set MSE of a network as an :class:`Objective`.

    The data is held as contiguous float arrays and decoded with views, so one
    evaluation is a couple of small matrix products.
    """

    def __init__(self, topology: Topology, X: np.ndarray, Y: np.ndarray, bounds: Bounds = Bounds(-10.0, 10.0)):
        X = np.ascontiguousarray(X, dtype=float)
        Y = np.ascontiguousarray(Y, dtype=float)
        if Y.ndim == 1:
            Y = Y[:, None]
        _check_batch(topology, X, Y)
        self.topology = topology
        self.X = X
        self.Y = Y
        super().__init__(self._mse, param_count(topology), bounds, name="mse")

    def _mse(self, v: np.ndarray) -> float:
        return mse_fitness(v, self.topology, self.X, self.Y)
