"""The full gesture model: stacked LSTM layers, projection, mixture heads.

A Model owns a flat dict of named float64 parameter arrays. Inference walks
the numpy path one event at a time; training builds an autodiff graph over a
whole batch of windows (see `build_window_loss`).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import autodiff as ad
from . import mdn, nn
from .container import (
    ContainerError,
    ContainerFormatError,
    ContainerVersionError,
    load_container,
    save_container,
)
from .data import TouchEvent
from .nn import LstmLayerParams, RnnState

CHECKPOINT_MAGIC = b"TJMODEL\x00"
CHECKPOINT_VERSION = 1

# Checkpoint load failures; no partial model ever escapes a failed load.
CheckpointError = ContainerError
CheckpointVersionError = ContainerVersionError
CheckpointFormatError = ContainerFormatError


class CheckpointDimError(CheckpointError):
    pass


@dataclass
class ModelConfig:
    layer_count: int = 3
    units: int = 64
    mixtures: int = 16
    input_width: int = 3

    def __post_init__(self):
        if min(self.layer_count, self.units, self.mixtures) <= 0:
            raise ValueError(f"config fields must be positive: {self}")
        if self.input_width != 3:
            raise ValueError("input_width must be 3 (x, y, dt)")

    @property
    def projection_width(self) -> int:
        # time head 3M + space head 6M
        return 9 * self.mixtures


class Model:
    """Parameters plus config; immutable during inference."""

    def __init__(self, config: ModelConfig, params: dict, training_steps: int = 0):
        self.config = config
        self.params = params
        self.training_steps = training_steps

    @classmethod
    def build(cls, config: ModelConfig, seed: int = 0) -> "Model":
        rng = np.random.default_rng(seed)
        params = {}
        width = config.input_width
        for i in range(config.layer_count):
            layer = nn.init_lstm_params(rng, width, config.units)
            params[f"lstm{i}.wx"] = layer.wx
            params[f"lstm{i}.wh"] = layer.wh
            params[f"lstm{i}.b"] = layer.b
            width = config.units
        params["proj.w"] = nn.glorot_uniform(
            rng, config.units, config.projection_width, (config.units, config.projection_width)
        )
        params["proj.b"] = np.zeros(config.projection_width)
        return cls(config, params)

    def zero_state(self, batch: int | None = None) -> RnnState:
        return RnnState.zeros(self.config.layer_count, self.config.units, batch)

    def _layer(self, i: int) -> LstmLayerParams:
        return LstmLayerParams(
            self.params[f"lstm{i}.wx"], self.params[f"lstm{i}.wh"], self.params[f"lstm{i}.b"]
        )

    # -- inference --------------------------------------------------------

    def project(self, x: np.ndarray, state: RnnState):
        """Advance every LSTM layer one step; return (raw projection, new state)."""
        new_layers = []
        h = x
        for i in range(self.config.layer_count):
            h, pair = nn.lstm_step(h, state.layers[i], self._layer(i))
            new_layers.append(pair)
        p = nn.dense_forward(h, self.params["proj.w"], self.params["proj.b"])
        return p, RnnState(new_layers)

    def forward_step(self, event: TouchEvent, state: RnnState):
        """One inference step: event -> (time params, space params, new state)."""
        event.validate()
        x = np.array([event.x, event.y, event.dt])
        p, new_state = self.project(x, state)
        time_params, space_params = mdn.split_and_transform(p, self.config.mixtures)
        return time_params, space_params, new_state

    def forward_sequence(self, events: np.ndarray, state: RnnState | None = None):
        """Teacher-forced pass over (T, 3) events; returns (T, 9M) raw projections."""
        if state is None:
            state = self.zero_state()
        out = np.empty((len(events), self.config.projection_width))
        for t, ev in enumerate(events):
            out[t], state = self.project(ev, state)
        return out, state

    # -- training graph ---------------------------------------------------

    def param_vars(self) -> dict:
        return {name: ad.Var(value) for name, value in self.params.items()}

    def build_window_loss(self, batch: np.ndarray, param_vars: dict | None = None):
        """Mean next-event loss over a (B, T, 3) batch of windows.

        Inputs are events[0..T-1), targets events[1..T); every window starts
        from a zero state. Returns (loss Var, param Var dict).
        """
        if param_vars is None:
            param_vars = self.param_vars()
        cfg = self.config
        b, t, _ = batch.shape
        n_pred = b * (t - 1)
        state = [
            (ad.constant(np.zeros((b, cfg.units))), ad.constant(np.zeros((b, cfg.units))))
            for _ in range(cfg.layer_count)
        ]
        total = ad.constant(0.0)
        for step in range(t - 1):
            h = ad.constant(batch[:, step, :])
            for i in range(cfg.layer_count):
                h, state[i] = nn.lstm_step_ad(
                    h,
                    state[i],
                    param_vars[f"lstm{i}.wx"],
                    param_vars[f"lstm{i}.wh"],
                    param_vars[f"lstm{i}.b"],
                    cfg.units,
                )
            p = h @ param_vars["proj.w"] + param_vars["proj.b"]
            m = cfg.mixtures
            time_raw = p[..., : 3 * m]
            space_raw = p[..., 3 * m :]
            target = batch[:, step + 1, :]
            total = total + mdn.nll_time_ad(time_raw, target[:, 2], m)
            total = total + mdn.nll_space_ad(space_raw, target[:, 0], target[:, 1], m)
        return total * (1.0 / n_pred), param_vars


# -- checkpoint container -------------------------------------------------


def save_checkpoint(model: Model, path) -> None:
    """Self-describing binary container: magic, version, JSON header with
    config and array dims, then float64 little-endian array data."""
    meta = {"config": asdict(model.config), "training_steps": model.training_steps}
    save_container(path, CHECKPOINT_MAGIC, CHECKPOINT_VERSION, meta, model.params)


def load_checkpoint(path) -> Model:
    meta, params = load_container(path, CHECKPOINT_MAGIC, CHECKPOINT_VERSION)
    try:
        config = ModelConfig(**meta["config"])
        training_steps = meta["training_steps"]
    except (ValueError, KeyError, TypeError) as exc:
        raise CheckpointFormatError(f"{path}: corrupt header: {exc}") from exc
    model = Model(config, params, training_steps=training_steps)
    _check_param_dims(model)
    return model


def _check_param_dims(model: Model) -> None:
    cfg = model.config
    expected = {}
    width = cfg.input_width
    for i in range(cfg.layer_count):
        expected[f"lstm{i}.wx"] = (width, 4 * cfg.units)
        expected[f"lstm{i}.wh"] = (cfg.units, 4 * cfg.units)
        expected[f"lstm{i}.b"] = (4 * cfg.units,)
        width = cfg.units
    expected["proj.w"] = (cfg.units, cfg.projection_width)
    expected["proj.b"] = (cfg.projection_width,)
    if set(expected) != set(model.params):
        raise CheckpointDimError(
            f"array names {sorted(model.params)} do not match config {cfg}"
        )
    for name, dims in expected.items():
        if model.params[name].shape != dims:
            raise CheckpointDimError(
                f"array {name!r} has dims {model.params[name].shape}, expected {dims}"
            )
