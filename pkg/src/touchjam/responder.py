"""Call-and-response: condition model state on a call, sample a response."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import mdn
from .data import DT_MAX, Performance, TouchEvent
from .model import Model
from .nn import RnnState

NEW_TOUCH_DT = 0.1  # a touch is new iff dt is strictly above this
MAX_RESPONSE_SECONDS = 5.0
MAX_RESPONSE_EVENTS = 1000
CENTRE_START = TouchEvent(0.5, 0.5, 0.0)


class GenerationError(RuntimeError):
    """Model failure mid-generation; carries the partial response length."""

    def __init__(self, message, partial_length=0):
        super().__init__(message)
        self.partial_length = partial_length


@dataclass
class GeneratedPerformance:
    """A sampled response with touch-state flags and a sound-mapping label."""

    performance: Performance
    touch_states: list  # "new" | "moving" per event
    mapping: str | None = None


def condition(model: Model, call: Performance) -> RnnState:
    """Propagate every call event from a zero state; predictions discarded.

    An empty call yields the zero state (unconditional mode).
    """
    state = model.zero_state()
    if len(call) == 0:
        return state
    call.validate()
    _, state = model.forward_sequence(call.events, state)
    return state


def classify_touch_state(performance: Performance):
    """Flag each event 'new' iff dt > 0.1, except the first which is always new."""
    flags = ["new" if dt > NEW_TOUCH_DT else "moving" for dt in performance.events[:, 2]]
    if flags:
        flags[0] = "new"
    return flags


def generate(
    model: Model,
    state: RnnState,
    seed: int,
    max_seconds: float = MAX_RESPONSE_SECONDS,
    first_input: TouchEvent = CENTRE_START,
) -> GeneratedPerformance:
    """Sample touch events until just before `max_seconds` of response is
    exceeded (or the hard event cap is hit).

    When conditioned, pass the final call event as `first_input` so the
    response continues from where the call left off.
    """
    rng = np.random.default_rng(seed)
    state = state.copy()
    prev = first_input
    events = []
    elapsed = 0.0
    while len(events) < MAX_RESPONSE_EVENTS:
        try:
            time_params, space_params, state = model.forward_step(prev, state)
            dt = mdn.sample_mixture_1d(time_params, rng)
            x, y = mdn.sample_mixture_2d(space_params, rng)
        except (FloatingPointError, ValueError) as exc:
            raise GenerationError(
                f"model failure after {len(events)} events: {exc}",
                partial_length=len(events),
            ) from exc
        dt = float(np.clip(dt, 0.0, DT_MAX))
        x = float(np.clip(x, 0.0, 1.0))
        y = float(np.clip(y, 0.0, 1.0))
        if elapsed + dt > max_seconds:
            break
        prev = TouchEvent(x, y, dt)
        events.append([x, y, dt])
        elapsed += dt
    performance = Performance(np.array(events).reshape(-1, 3), source="generated")
    return GeneratedPerformance(performance, classify_touch_state(performance))


def respond(model: Model, call: Performance, seed: int) -> GeneratedPerformance:
    """Condition on a call, then generate; the last call event seeds the loop."""
    state = condition(model, call)
    if len(call) > 0:
        x, y, dt = call.events[-1]
        first = TouchEvent(float(x), float(y), float(dt))
    else:
        first = CENTRE_START
    return generate(model, state, seed, first_input=first)


def assign_mapping(available, current, rng: np.random.Generator) -> str:
    """Uniform choice over sound mappings, excluding the user's current one."""
    allowed = [m for m in available if m != current]
    if len(available) < 2 or not allowed:
        raise ValueError("need at least two distinct mappings to pick from")
    return allowed[int(rng.integers(0, len(allowed)))]


def mean_generated_location(responses) -> tuple:
    """Diagnostic: mean (x, y) over generated events, to observe location drift."""
    pts = np.concatenate([r.performance.events[:, :2] for r in responses if len(r.performance)])
    return float(pts[:, 0].mean()), float(pts[:, 1].mean())
