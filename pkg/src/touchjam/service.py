"""REST service for the call-and-response protocol.

Wire performances carry absolute times within the performance; the dt
representation is internal, and conversion both ways happens here. Responses
are serialized with a canonical JSON encoding so identical seeded requests
produce byte-identical bodies.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from . import responder
from .data import Performance
from .model import Model, load_checkpoint

WIRE_VERSION = 1
DEFAULT_MAPPINGS = ["drums", "strings", "bass", "synth"]
MAX_WIRE_SECONDS = 5.0


class WireError(ValueError):
    def __init__(self, status, error_code, detail):
        super().__init__(detail)
        self.status = status
        self.error_code = error_code
        self.detail = detail


def _error_response(status, error_code, detail):
    return _json_response({"error_code": error_code, "detail": detail}, status)


def _json_response(payload, status=200):
    body = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return Response(content=body, status_code=status, media_type="application/json")


def parse_wire_performance(obj) -> Performance:
    """Validate a WirePerformance object and convert it to internal dt form.

    Structural problems raise 400-class WireErrors; out-of-range values 422.
    """
    if not isinstance(obj, dict):
        raise WireError(400, "invalid_schema", "performance must be an object")
    if obj.get("version") != WIRE_VERSION:
        raise WireError(400, "invalid_schema", f"unsupported schema version {obj.get('version')!r}")
    events = obj.get("events")
    if not isinstance(events, list):
        raise WireError(400, "invalid_schema", "performance.events must be a list")
    if len(events) == 0:
        raise WireError(400, "empty_performance", "performance has no events")
    rows = []
    for i, ev in enumerate(events):
        if not isinstance(ev, dict):
            raise WireError(400, "invalid_schema", f"event {i} is not an object")
        try:
            t = float(ev["t"])
            x = float(ev["x"])
            y = float(ev["y"])
        except (KeyError, TypeError, ValueError):
            raise WireError(400, "invalid_schema", f"event {i} needs numeric x, y, t")
        rows.append((t, x, y))
    prev_t = 0.0
    out = []
    for i, (t, x, y) in enumerate(rows):
        if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
            raise WireError(422, "out_of_range", f"event {i} location ({x}, {y}) outside unit square")
        if t > MAX_WIRE_SECONDS:
            raise WireError(422, "out_of_range", f"event {i} time {t} exceeds {MAX_WIRE_SECONDS} s")
        if t < prev_t:
            raise WireError(422, "out_of_range", f"event {i} time {t} decreases")
        out.append([x, y, t - prev_t if i > 0 else t])
        prev_t = t
    return Performance(np.array(out))


def wire_performance(generated: responder.GeneratedPerformance) -> dict:
    """Internal dt form -> WirePerformance with absolute times."""
    events = []
    t = 0.0
    for (x, y, dt), flag in zip(generated.performance.events, generated.touch_states):
        t += dt
        events.append({"moving": flag == "moving", "t": round(t, 6), "x": round(x, 6), "y": round(y, 6)})
    return {"events": events, "version": WIRE_VERSION}


def create_app(
    model: Model | None = None,
    checkpoint_path=None,
    mappings=None,
    cors_origin: str = "*",
) -> FastAPI:
    app = FastAPI(title="touchjam")
    app.add_middleware(
        CORSMiddleware, allow_origins=[cors_origin], allow_methods=["*"], allow_headers=["*"]
    )
    if model is None and checkpoint_path is not None:
        model = load_checkpoint(checkpoint_path)
    app.state.model = model
    app.state.checkpoint_id = str(checkpoint_path) if checkpoint_path else "in-memory"
    app.state.mappings = list(mappings) if mappings else list(DEFAULT_MAPPINGS)
    app.state.started = time.monotonic()

    @app.get("/health")
    def health():
        return _json_response(
            {
                "model_loaded": app.state.model is not None,
                "status": "ok",
                "uptime_s": round(time.monotonic() - app.state.started, 3),
            }
        )

    @app.get("/api/v1/model")
    def model_info():
        m = app.state.model
        if m is None:
            return _error_response(503, "model_unavailable", "no checkpoint loaded")
        return _json_response(
            {
                "checkpoint_id": app.state.checkpoint_id,
                "config": asdict(m.config),
                "training_steps": m.training_steps,
            }
        )

    @app.post("/api/v1/respond")
    async def respond(request: Request):
        m = app.state.model
        if m is None:
            return _error_response(503, "model_unavailable", "no checkpoint loaded")
        raw = await request.body()
        try:
            body = json.loads(raw)
        except ValueError:
            return _error_response(400, "malformed_json", "request body is not valid JSON")
        if not isinstance(body, dict) or "performance" not in body:
            return _error_response(400, "invalid_schema", "body must contain 'performance'")
        seed = body.get("seed")
        if seed is None:
            seed = int(np.random.SeedSequence().entropy % (2**32))
        elif not isinstance(seed, int):
            return _error_response(400, "invalid_schema", "seed must be an integer")
        current_mapping = body.get("current_mapping")
        try:
            call = parse_wire_performance(body["performance"])
        except WireError as exc:
            return _error_response(exc.status, exc.error_code, exc.detail)

        # Each request owns its rng streams; model parameters are read-only.
        gen_seed, map_seed = np.random.SeedSequence(seed).spawn(2)
        generated = responder.respond(m, call, gen_seed)
        mapping = responder.assign_mapping(
            app.state.mappings, current_mapping, np.random.default_rng(map_seed)
        )
        return _json_response(
            {
                "mapping": mapping,
                "model": app.state.checkpoint_id,
                "response": wire_performance(generated),
            }
        )

    return app
