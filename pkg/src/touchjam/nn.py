"""Dense and LSTM primitives, gradient clipping, and Adam.

Parameters live in plain float64 numpy arrays. The inference path below is
pure numpy; training builds the same math out of autodiff Vars (see
`touchjam.model`), so both paths share one set of formulas.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad


class DimensionError(ValueError):
    """Raised when tensor dims do not conform; message names both shapes."""


def _check_matmul(a_shape, b_shape, op):
    if a_shape[-1] != b_shape[0]:
        raise DimensionError(
            f"{op}: inner dims do not conform, got {a_shape} @ {b_shape}"
        )


def dense_forward(x: np.ndarray, weights: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """x @ weights + bias for a batch of row vectors."""
    x = np.asarray(x, dtype=np.float64)
    _check_matmul(x.shape, weights.shape, "dense_forward")
    if bias.shape[-1] != weights.shape[1]:
        raise DimensionError(
            f"dense_forward: bias {bias.shape} does not match output dim {weights.shape[1]}"
        )
    return x @ weights + bias


@dataclass
class LstmLayerParams:
    """One LSTM layer: stacked gate weights in order (input, forget, candidate, output).

    wx: (input_width, 4*units), wh: (units, 4*units), b: (4*units,)
    """

    wx: np.ndarray
    wh: np.ndarray
    b: np.ndarray

    @property
    def units(self) -> int:
        return self.wh.shape[0]

    @property
    def input_width(self) -> int:
        return self.wx.shape[0]

    def validate(self):
        u = self.units
        if self.wx.shape[1] != 4 * u or self.wh.shape != (u, 4 * u) or self.b.shape != (4 * u,):
            raise DimensionError(
                f"LstmLayerParams: inconsistent shapes wx={self.wx.shape} "
                f"wh={self.wh.shape} b={self.b.shape}"
            )


@dataclass
class RnnState:
    """Per-layer (hidden, cell) pairs; zeroed at construction."""

    layers: list  # list of (h, c) ndarray pairs

    @classmethod
    def zeros(cls, layer_count: int, units: int, batch: int | None = None) -> "RnnState":
        shape = (units,) if batch is None else (batch, units)
        return cls([(np.zeros(shape), np.zeros(shape)) for _ in range(layer_count)])

    def copy(self) -> "RnnState":
        return RnnState([(h.copy(), c.copy()) for h, c in self.layers])


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def lstm_step(x: np.ndarray, prev: tuple, params: LstmLayerParams):
    """One LSTM time step. Returns (h_new, (h_new, c_new)).

    Standard forget-gate LSTM, no peepholes:
    i,f,o = sigmoid(.), g = tanh(.), c' = f*c + i*g, h' = o*tanh(c').
    """
    params.validate()
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != params.input_width:
        raise DimensionError(
            f"lstm_step: input width {x.shape[-1]} != expected {params.input_width}"
        )
    h, c = prev
    u = params.units
    z = x @ params.wx + h @ params.wh + params.b
    i = _sigmoid(z[..., :u])
    f = _sigmoid(z[..., u : 2 * u])
    g = np.tanh(z[..., 2 * u : 3 * u])
    o = _sigmoid(z[..., 3 * u :])
    c_new = f * c + i * g
    h_new = o * np.tanh(c_new)
    return h_new, (h_new, c_new)


def lstm_step_ad(x: ad.Var, prev: tuple, wx: ad.Var, wh: ad.Var, b: ad.Var, units: int):
    """Autodiff twin of `lstm_step`; same gate order and formulas."""
    h, c = prev
    z = x @ wx + h @ wh + b
    i = ad.sigmoid(z[..., :units])
    f = ad.sigmoid(z[..., units : 2 * units])
    g = ad.tanh(z[..., 2 * units : 3 * units])
    o = ad.sigmoid(z[..., 3 * units :])
    c_new = f * c + i * g
    h_new = o * ad.tanh(c_new)
    return h_new, (h_new, c_new)


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int, shape) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def init_lstm_params(rng: np.random.Generator, input_width: int, units: int) -> LstmLayerParams:
    """Glorot-uniform weights; zero biases except forget-gate bias = 1."""
    wx = glorot_uniform(rng, input_width, units, (input_width, 4 * units))
    wh = glorot_uniform(rng, units, units, (units, 4 * units))
    b = np.zeros(4 * units)
    b[units : 2 * units] = 1.0
    return LstmLayerParams(wx, wh, b)


def clip_gradients(grads: dict, max_global_norm: float) -> dict:
    """Scale all gradients so the global L2 norm is at most max_global_norm."""
    if max_global_norm <= 0:
        raise ValueError("max_global_norm must be positive")
    total = np.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if total <= max_global_norm or total == 0.0:
        return {k: g.copy() for k, g in grads.items()}
    scale = max_global_norm / total
    return {k: g * scale for k, g in grads.items()}


@dataclass
class AdamState:
    """Adam accumulators keyed like the parameter dict."""

    learning_rate: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def adam_update(params: dict, grads: dict, state: AdamState) -> None:
    """Standard Adam with bias correction; mutates params and state in place."""
    state.step += 1
    t = state.step
    b1, b2 = state.beta1, state.beta2
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise DimensionError(
                f"adam_update: grad {g.shape} does not match param {p.shape} for {name!r}"
            )
        m = state.m.setdefault(name, np.zeros_like(p))
        v = state.v.setdefault(name, np.zeros_like(p))
        m[...] = b1 * m + (1.0 - b1) * g
        v[...] = b2 * v + (1.0 - b2) * g * g
        m_hat = m / (1.0 - b1**t)
        v_hat = v / (1.0 - b2**t)
        p -= state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)
