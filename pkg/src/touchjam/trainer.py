"""Training loop, validation scoring, loss logging, checkpoint cadence."""

from __future__ import annotations

import csv
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import mdn, nn
from .model import Model, save_checkpoint

log = logging.getLogger(__name__)


class TrainingError(RuntimeError):
    """Raised on a non-finite loss; carries the offending batch index."""

    def __init__(self, message, batch_index=None):
        super().__init__(message)
        self.batch_index = batch_index


@dataclass
class TrainingHyper:
    learning_rate: float = 1e-4
    max_epochs: int = 5
    clip_norm: float = 10.0
    checkpoint_every: int = 100  # steps
    log_every: int = 10  # steps
    seed: int = 0

    def __post_init__(self):
        for name in ("learning_rate", "max_epochs", "clip_norm", "checkpoint_every", "log_every"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class LossLog:
    """Rows of (step, training loss, optional validation loss, wall ms)."""

    rows: list = field(default_factory=list)

    def append(self, step, train_loss, val_loss=None, wall_ms=0.0):
        if self.rows and step <= self.rows[-1][0]:
            raise ValueError("log steps must be strictly increasing")
        self.rows.append((step, train_loss, val_loss, wall_ms))

    def save_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "train_loss", "val_loss", "wall_ms"])
            for step, tr, va, ms in self.rows:
                writer.writerow([step, repr(tr), "" if va is None else repr(va), f"{ms:.1f}"])

    @classmethod
    def load_csv(cls, path):
        out = cls()
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                out.append(
                    int(row["step"]),
                    float(row["train_loss"]),
                    float(row["val_loss"]) if row["val_loss"] else None,
                    float(row["wall_ms"]),
                )
        return out


def train_step(model: Model, batch: np.ndarray, hyper: TrainingHyper, adam: nn.AdamState) -> float:
    """One optimization step on a (B, T, 3) batch; returns the loss."""
    loss_var, param_vars = model.build_window_loss(batch)
    loss = float(loss_var.value)
    if not math.isfinite(loss):
        raise TrainingError(f"non-finite training loss {loss}")
    _apply_update(model, loss_var, param_vars, hyper, adam)
    return loss


def _apply_update(model, loss_var, param_vars, hyper, adam):
    loss_var.backward()
    grads = {name: var.grad for name, var in param_vars.items()}
    grads = nn.clip_gradients(grads, hyper.clip_norm)
    nn.adam_update(model.params, grads, adam)
    model.training_steps += 1


def train(
    model: Model,
    batches: np.ndarray,
    hyper: TrainingHyper,
    validation=None,
    checkpoint_dir=None,
    loss_log: LossLog | None = None,
):
    """Train over `batches` (NB, B, T, 3) for hyper.max_epochs epochs.

    Validation (a list of Performances) is scored at the end of each epoch.
    Returns (final checkpoint path or None, LossLog). A non-finite loss
    aborts immediately with the batch index; it is never silently skipped.

    Cadence checkpoints snapshot the parameters *before* the step's update,
    so each one reloads and reproduces the logged loss on its batch; a final
    post-update checkpoint is written when training ends.
    """
    if len(batches) == 0:
        raise TrainingError("no training batches")
    if loss_log is None:
        loss_log = LossLog()
    adam = nn.AdamState(learning_rate=hyper.learning_rate)
    checkpoint_dir = Path(checkpoint_dir) if checkpoint_dir is not None else None
    if checkpoint_dir is not None:
        checkpoint_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.monotonic()
    final_path = None

    def write_checkpoint(tag):
        nonlocal final_path
        if checkpoint_dir is None:
            return
        final_path = checkpoint_dir / tag
        save_checkpoint(model, final_path)

    for epoch in range(hyper.max_epochs):
        for b, batch in enumerate(batches):
            step = model.training_steps + 1
            loss_var, param_vars = model.build_window_loss(batch)
            loss = float(loss_var.value)
            if not math.isfinite(loss):
                raise TrainingError(
                    f"epoch {epoch} batch {b}: non-finite training loss {loss}",
                    batch_index=b,
                )
            is_epoch_end = b == len(batches) - 1
            val = evaluate(model, validation) if (is_epoch_end and validation) else None
            if step % hyper.log_every == 0 or is_epoch_end:
                loss_log.append(step, loss, val, (time.monotonic() - t0) * 1000.0)
                log.info("step %d loss %.4f val %s", step, loss, val)
            if step % hyper.checkpoint_every == 0 or is_epoch_end:
                write_checkpoint(f"step{step:06d}.tjm")
            _apply_update(model, loss_var, param_vars, hyper, adam)
    write_checkpoint("final.tjm")
    return final_path, loss_log


def evaluate(model: Model, performances) -> float:
    """Mean next-event loss over held-out performances, teacher-forced from a
    zero state; never mutates the model."""
    if not performances:
        raise ValueError("empty evaluation set")
    total = 0.0
    count = 0
    m = model.config.mixtures
    for perf in performances:
        ev = perf.events
        if len(ev) < 2:
            raise ValueError("evaluation performances need at least 2 events")
        proj, _ = model.forward_sequence(ev[:-1])
        time_params, space_params = mdn.split_and_transform(proj, m)
        n = len(ev) - 1
        loss = mdn.nll_time(time_params, ev[1:, 2]) + mdn.nll_space(
            space_params, ev[1:, 0], ev[1:, 1]
        )
        total += loss * n
        count += n
    return total / count
