"""Minimal dense-network core.

Plain numpy MLPs with exact reverse-mode gradients, an Adam optimizer that
operates on flat lists of parameter arrays, and the inverse-time-decay
learning-rate schedule used by the trainer. Everything is float64 and
deterministic for a fixed seed; shape mismatches are hard errors, never
broadcasts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericError, ShapeError

# Weight init scale for Normal(0, sigma^2) draws; biases start at zero.
INIT_STD = 0.1

_ACTIVATIONS = ("identity", "relu", "tanh")


def as_matrix(a, name="array", rows=None, cols=None):
    """Coerce to a 2-D float64 array, checking declared dimensions."""
    out = np.asarray(a, dtype=np.float64)
    if out.ndim != 2:
        raise ShapeError(f"{name}: expected 2-D array, got ndim={out.ndim}")
    if rows is not None and out.shape[0] != rows:
        raise ShapeError(f"{name}: expected {rows} rows, got {out.shape[0]}")
    if cols is not None and out.shape[1] != cols:
        raise ShapeError(f"{name}: expected {cols} cols, got {out.shape[1]}")
    return out


def check_finite(a, name="array"):
    """Raise NumericError if any entry is NaN or infinite."""
    if not np.all(np.isfinite(a)):
        raise NumericError(f"{name} contains non-finite entries")
    return a


@dataclass
class DenseLayer:
    """Affine map followed by an elementwise activation."""

    weight: np.ndarray  # (in_dim, out_dim)
    bias: np.ndarray  # (out_dim,)
    activation: str = "identity"

    def __post_init__(self):
        self.weight = np.asarray(self.weight, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weight.ndim != 2:
            raise ConfigError("DenseLayer weight must be 2-D")
        if self.bias.shape != (self.weight.shape[1],):
            raise ConfigError(
                f"DenseLayer bias shape {self.bias.shape} does not match "
                f"out_dim {self.weight.shape[1]}"
            )
        if self.activation not in _ACTIVATIONS:
            raise ConfigError(f"unknown activation {self.activation!r}")

    @property
    def in_dim(self):
        return self.weight.shape[0]

    @property
    def out_dim(self):
        return self.weight.shape[1]


@dataclass
class Mlp:
    """A chain of DenseLayers with matching inner dimensions."""

    layers: list[DenseLayer]

    def __post_init__(self):
        if not self.layers:
            raise ConfigError("Mlp needs at least one layer")
        for a, b in zip(self.layers, self.layers[1:]):
            if a.out_dim != b.in_dim:
                raise ConfigError(
                    f"layer dims do not chain: {a.out_dim} -> {b.in_dim}"
                )

    @property
    def in_dim(self):
        return self.layers[0].in_dim

    @property
    def out_dim(self):
        return self.layers[-1].out_dim

    def copy(self):
        return Mlp(
            [
                DenseLayer(l.weight.copy(), l.bias.copy(), l.activation)
                for l in self.layers
            ]
        )


def init_params(dims, seed, hidden_activation="relu", output_activation="identity"):
    """Build an Mlp for the dimension chain `dims`.

    Weights are i.i.d. Normal(0, INIT_STD^2), biases zero. Deterministic for a
    fixed seed.
    """
    dims = [int(d) for d in dims]
    if len(dims) < 2:
        raise ConfigError("need at least an input and an output dimension")
    if any(d < 1 for d in dims):
        raise ConfigError(f"all dims must be >= 1, got {dims}")
    rng = np.random.default_rng(seed)
    layers = []
    for i, (din, dout) in enumerate(zip(dims, dims[1:])):
        act = output_activation if i == len(dims) - 2 else hidden_activation
        w = rng.normal(0.0, INIT_STD, size=(din, dout))
        layers.append(DenseLayer(w, np.zeros(dout), act))
    return Mlp(layers)


def _apply_activation(z, activation):
    if activation == "identity":
        return z
    if activation == "relu":
        return np.maximum(z, 0.0)
    return np.tanh(z)


def forward_cached(net: Mlp, x):
    """Forward pass keeping pre-activations and layer inputs for backward."""
    a = as_matrix(x, "input", cols=net.in_dim)
    inputs = []
    preacts = []
    for layer in net.layers:
        inputs.append(a)
        z = a @ layer.weight + layer.bias
        preacts.append(z)
        a = _apply_activation(z, layer.activation)
    return a, inputs, preacts


def forward(net: Mlp, x):
    """Affine-then-activation composition; output has the same row count."""
    out, _, _ = forward_cached(net, x)
    return out


def backward(net: Mlp, x, upstream, cache=None):
    """Exact reverse-mode gradients.

    `upstream` is dL/d(output). Returns ([(dW, db) per layer], dL/d(input)).
    Pass `cache = (inputs, preacts)` from forward_cached to skip recomputing
    the forward pass.
    """
    if cache is None:
        _, inputs, preacts = forward_cached(net, x)
    else:
        inputs, preacts = cache
    up = as_matrix(upstream, "upstream_grad", rows=inputs[0].shape[0], cols=net.out_dim)
    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(net.layers)
    for i in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[i]
        z = preacts[i]
        if layer.activation == "relu":
            dz = up * (z > 0.0)
        elif layer.activation == "tanh":
            t = np.tanh(z)
            dz = up * (1.0 - t * t)
        else:
            dz = up
        grads[i] = (inputs[i].T @ dz, dz.sum(axis=0))
        up = dz @ layer.weight.T
    return grads, up


@dataclass
class AdamState:
    """Per-parameter first/second moment accumulators plus the step counter."""

    step: int
    first_moment: list[np.ndarray]
    second_moment: list[np.ndarray]
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def for_params(cls, params, beta1=0.9, beta2=0.999, epsilon=1e-8):
        return cls(
            step=0,
            first_moment=[np.zeros_like(p) for p in params],
            second_moment=[np.zeros_like(p) for p in params],
            beta1=beta1,
            beta2=beta2,
            epsilon=epsilon,
        )


def adam_step(params, grads, state: AdamState, lr, names=None):
    """One Adam update with bias correction, applied to `params` in place.

    `params` and `grads` are parallel lists of arrays. Non-finite gradients
    raise NumericError naming the offending component.
    """
    if lr <= 0:
        raise ConfigError(f"learning rate must be positive, got {lr}")
    if len(params) != len(grads) or len(params) != len(state.first_moment):
        raise ShapeError("params/grads/state length mismatch")
    for i, (p, g) in enumerate(zip(params, grads)):
        if p.shape != g.shape:
            label = names[i] if names else f"param[{i}]"
            raise ShapeError(f"{label}: grad shape {g.shape} != param shape {p.shape}")
        if not np.all(np.isfinite(g)):
            label = names[i] if names else f"param[{i}]"
            raise NumericError(f"non-finite gradient in {label}")
    state.step += 1
    t = state.step
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1**t
    bc2 = 1.0 - b2**t
    for p, g, m, v in zip(params, grads, state.first_moment, state.second_moment):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        p -= lr * (m / bc1) / (np.sqrt(v / bc2) + state.epsilon)
    return params, state


@dataclass
class LrSchedule:
    """Inverse time decay stepped every `iterations_per_decay` epochs."""

    base_rate: float
    decay_rate: float
    iterations_per_decay: int

    def __post_init__(self):
        if self.base_rate <= 0:
            raise ConfigError(f"base_rate must be > 0, got {self.base_rate}")
        if not 0.0 < self.decay_rate <= 1.0:
            raise ConfigError(f"decay_rate must lie in (0, 1], got {self.decay_rate}")
        if self.iterations_per_decay < 1:
            raise ConfigError("iterations_per_decay must be >= 1")


def lr_at(schedule: LrSchedule, epoch):
    """Rate at a 0-based epoch: base / (1 + (1 - decay) * floor(epoch / iters))."""
    if epoch < 0:
        raise ConfigError(f"epoch must be >= 0, got {epoch}")
    steps = epoch // schedule.iterations_per_decay
    return schedule.base_rate / (1.0 + (1.0 - schedule.decay_rate) * steps)
