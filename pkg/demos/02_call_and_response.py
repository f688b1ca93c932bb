"""Condition the model on a short 'call' gesture and sample a response.

Uses the checkpoint written by demo 01 if present, otherwise a freshly
initialized (untrained) model — the sampling contract is the same either
way: the response stays inside the unit square and under five seconds.

Run:  python3 demos/02_call_and_response.py
"""

from pathlib import Path

import numpy as np

from touchjam import responder
from touchjam.data import Performance
from touchjam.model import Model, ModelConfig, load_checkpoint

CKPT = Path("demo_output/checkpoints/final.tjm")


def main():
    if CKPT.exists():
        model = load_checkpoint(CKPT)
        print(f"loaded {CKPT} ({model.training_steps} training steps)")
    else:
        model = Model.build(ModelConfig(layer_count=1, units=24, mixtures=4), seed=0)
        print("no checkpoint found; using an untrained model")

    # a three-tap call moving diagonally across the screen
    call = Performance(
        np.array([[0.2, 0.8, 0.0], [0.5, 0.5, 0.4], [0.8, 0.2, 0.4]])
    )
    state = responder.condition(model, call)
    gen = responder.respond(model, call, seed=42)

    ev = gen.performance.events
    print(f"response: {len(ev)} events, {ev[:, 2].sum():.2f} s total")
    for (x, y, dt), touch in zip(ev[:8], gen.touch_states[:8]):
        print(f"  ({x:.3f}, {y:.3f})  dt={dt:.3f}  {touch}")
    if len(ev) > 8:
        print(f"  ... {len(ev) - 8} more")

    # the same seed always yields the same response
    again = responder.respond(model, call, seed=42)
    assert np.array_equal(gen.performance.events, again.performance.events)
    print("seed 42 reproduces the identical response — deterministic sampling")
    # discard `state` example: conditioning alone never mutates the model
    _ = state


if __name__ == "__main__":
    main()
