"""Corpus ingestion, normalization, windowing, batching, and synthesis.

Touch events are triples (x, y, dt) with x, y in the unit square and dt the
seconds since the previous event, clamped to [0, 5]. Performances are stored
as (N, 3) float64 arrays.
"""

from __future__ import annotations

import csv
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .container import load_container, save_container

log = logging.getLogger(__name__)

DATASET_MAGIC = b"TJDATA\x00\x00"
DATASET_VERSION = 1

WINDOW = 256
BATCH = 128
DT_MAX = 5.0


class CorpusFormatError(ValueError):
    """A malformed corpus file; message carries file and line number."""


@dataclass(frozen=True)
class TouchEvent:
    x: float
    y: float
    dt: float

    def validate(self):
        if not (0.0 <= self.x <= 1.0 and 0.0 <= self.y <= 1.0):
            raise ValueError(f"touch location ({self.x}, {self.y}) outside unit square")
        if not (0.0 <= self.dt <= DT_MAX) or not np.isfinite(self.dt):
            raise ValueError(f"dt {self.dt} outside [0, {DT_MAX}]")


@dataclass
class Performance:
    """An ordered sequence of touch events, as an (N, 3) array of (x, y, dt)."""

    events: np.ndarray
    performer: str | None = None
    source: str | None = None

    def __post_init__(self):
        self.events = np.asarray(self.events, dtype=np.float64).reshape(-1, 3)

    def __len__(self):
        return len(self.events)

    @property
    def duration(self) -> float:
        return float(self.events[:, 2].sum())

    def validate(self):
        ev = self.events
        if len(ev) == 0:
            raise ValueError("performance is empty")
        if not np.isfinite(ev).all():
            raise ValueError("performance contains non-finite values")
        if (ev[:, :2] < 0).any() or (ev[:, :2] > 1).any():
            raise ValueError("touch locations outside the unit square")
        if (ev[:, 2] < 0).any() or (ev[:, 2] > DT_MAX).any():
            raise ValueError(f"dt outside [0, {DT_MAX}]")


def normalize_performance(times, xs, ys, resolution, performer=None, source=None) -> Performance:
    """Absolute times and raw coordinates -> a normalized Performance.

    Coordinates are divided by the source resolution (width, height); absolute
    times become deltas clamped to [0, 5], with the first event's dt = 0.
    """
    w, h = resolution
    if w <= 0 or h <= 0:
        raise ValueError(f"resolution must be positive, got {resolution}")
    times = np.asarray(times, dtype=np.float64)
    if (np.diff(times) < 0).any():
        raise ValueError("absolute times must be nondecreasing")
    dts = np.empty_like(times)
    dts[0] = 0.0
    dts[1:] = np.minimum(np.diff(times), DT_MAX)
    ev = np.column_stack(
        [np.asarray(xs, dtype=np.float64) / w, np.asarray(ys, dtype=np.float64) / h, dts]
    )
    return Performance(ev, performer=performer, source=source)


def _read_corpus_file(path):
    """Parse one corpus CSV: header `time,x,y,performer`, rows ordered by time,
    resolution declared in a comment line `# resolution:W,H`."""
    resolution = None
    rows = []
    with open(path, newline="") as fh:
        lineno = 0
        header_seen = False
        for raw in fh:
            lineno += 1
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("resolution:"):
                    try:
                        w, h = body[len("resolution:") :].split(",")
                        resolution = (float(w), float(h))
                    except ValueError:
                        raise CorpusFormatError(f"{path}:{lineno}: bad resolution line {line!r}")
                continue
            fields = next(csv.reader([line]))
            if not header_seen:
                if [f.strip() for f in fields] != ["time", "x", "y", "performer"]:
                    raise CorpusFormatError(
                        f"{path}:{lineno}: expected header time,x,y,performer, got {line!r}"
                    )
                header_seen = True
                continue
            if len(fields) != 4:
                raise CorpusFormatError(f"{path}:{lineno}: expected 4 fields, got {len(fields)}")
            try:
                t, x, y = float(fields[0]), float(fields[1]), float(fields[2])
            except ValueError:
                raise CorpusFormatError(f"{path}:{lineno}: non-numeric value in {line!r}")
            rows.append((lineno, t, x, y, fields[3].strip()))
    if resolution is None:
        raise CorpusFormatError(f"{path}: missing '# resolution:W,H' line")
    return resolution, rows


def ingest_corpus(paths) -> list[Performance]:
    """Read corpus CSV files into one Performance per (file, performer) pair."""
    performances = []
    for path in paths:
        resolution, rows = _read_corpus_file(path)
        if not rows:
            log.warning("corpus file %s has no events, skipping", path)
            continue
        by_performer: dict[str, list] = {}
        for row in rows:
            by_performer.setdefault(row[4], []).append(row)
        for performer, prows in by_performer.items():
            for prev, cur in zip(prows, prows[1:]):
                if cur[1] < prev[1]:
                    raise CorpusFormatError(
                        f"{path}:{cur[0]}: out-of-order timestamp for performer {performer!r}"
                    )
            times = [r[1] for r in prows]
            xs = [r[2] for r in prows]
            ys = [r[3] for r in prows]
            performances.append(
                normalize_performance(times, xs, ys, resolution, performer=performer, source=str(path))
            )
    return performances


def window_examples(performances, window: int = WINDOW, stride: int = 1) -> np.ndarray:
    """Concatenate performances end-to-end, then slice overlapping windows.

    Returns (K, window, 3); the remainder shorter than one window is dropped.
    """
    if stride < 1:
        raise ValueError("stride must be >= 1")
    seq = np.concatenate([p.events for p in performances], axis=0)
    n = len(seq)
    if n < window:
        warnings.warn(f"only {n} events, fewer than one {window}-event window")
        return np.empty((0, window, 3))
    count = (n - window) // stride + 1
    out = np.empty((count, window, 3))
    for k in range(count):
        out[k] = seq[k * stride : k * stride + window]
    return out


def make_batches(examples: np.ndarray, batch: int = BATCH, seed: int = 0) -> np.ndarray:
    """Deterministic shuffle, then chunk into (B, batch, window, 3); the
    partial final chunk is dropped."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(examples))
    full = (len(examples) // batch) * batch
    shuffled = examples[order[:full]]
    return shuffled.reshape(len(shuffled) // batch, batch, examples.shape[1], 3)


def save_dataset(path, examples: np.ndarray) -> None:
    """Persist windowed examples (K, window, 3) in the versioned container."""
    save_container(
        path, DATASET_MAGIC, DATASET_VERSION, {"window": int(examples.shape[1])},
        {"examples": examples},
    )


def load_dataset(path) -> np.ndarray:
    _, arrays = load_container(path, DATASET_MAGIC, DATASET_VERSION)
    return arrays["examples"]


# -- synthetic corpus -----------------------------------------------------

TAP_CLUSTERS = [(0.2, 0.3), (0.7, 0.2), (0.5, 0.8), (0.85, 0.7)]


@dataclass
class SynthSpec:
    """What to generate: (pattern, event_count) pairs; patterns are
    'tapper', 'swirler', or 'mixed'."""

    parts: list = field(default_factory=lambda: [("tapper", 2000), ("swirler", 2000), ("mixed", 2000)])


def _synth_tapper(rng, n):
    """Isolated touches on a dt grid at clustered locations."""
    centers = np.array(TAP_CLUSTERS)
    idx = rng.integers(0, len(centers), size=n)
    xy = np.clip(centers[idx] + rng.normal(0, 0.04, size=(n, 2)), 0.0, 1.0)
    dts = rng.choice([0.25, 0.5], size=n)
    dts[0] = 0.0
    return np.column_stack([xy, dts])


def _synth_swirler(rng, n):
    """A smooth Lissajous path sampled at small time deltas."""
    cx, cy = rng.uniform(0.3, 0.7, size=2)
    r = rng.uniform(0.1, 0.25)
    fx = rng.integers(1, 4)
    fy = rng.integers(1, 4)
    phase = rng.uniform(0, 2 * np.pi)
    t = np.cumsum(rng.uniform(0.01, 0.03, size=n))
    xs = np.clip(cx + r * np.sin(2 * np.pi * 0.4 * fx * t + phase), 0.0, 1.0)
    ys = np.clip(cy + r * np.cos(2 * np.pi * 0.4 * fy * t), 0.0, 1.0)
    dts = np.empty(n)
    dts[0] = 0.0
    dts[1:] = np.diff(t)
    return np.column_stack([xs, ys, dts])


def _synth_mixed(rng, n):
    """Alternating tap and swirl segments."""
    chunks = []
    remaining = n
    use_taps = bool(rng.integers(0, 2))
    while remaining > 0:
        size = int(min(remaining, rng.integers(20, 60)))
        gen = _synth_tapper if use_taps else _synth_swirler
        chunks.append(gen(rng, size))
        use_taps = not use_taps
        remaining -= size
    out = np.concatenate(chunks, axis=0)
    out[0, 2] = 0.0
    return out


_GENERATORS = {"tapper": _synth_tapper, "swirler": _synth_swirler, "mixed": _synth_mixed}


def synth_corpus(spec: SynthSpec, seed: int = 0) -> list[Performance]:
    """Deterministic synthetic performances for desk-scale training."""
    rng = np.random.default_rng(seed)
    performances = []
    for i, (pattern, count) in enumerate(spec.parts):
        if pattern not in _GENERATORS:
            raise ValueError(f"unknown synth pattern {pattern!r}")
        ev = _GENERATORS[pattern](rng, count)
        performances.append(Performance(ev, performer=f"{pattern}-{i}", source="synthetic"))
    return performances
