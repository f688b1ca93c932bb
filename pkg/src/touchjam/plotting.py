"""Deterministic SVG rendering of performances.

The unit square maps to the image with y drawn downward (touchscreen
convention). Runs of moving touches join into polylines; isolated touches
draw as dots. Call layers draw in blue, response layers in red.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .data import Performance
from .responder import classify_touch_state

CALL_COLOR = "#1f77b4"  # blue
RESPONSE_COLOR = "#d62728"  # red


@dataclass
class PlotSpec:
    performances: list  # call layer(s)
    responses: list = field(default_factory=list)  # overlay layer(s)
    width: int = 400
    height: int = 400

    def __post_init__(self):
        if not self.performances and not self.responses:
            raise ValueError("plot needs at least one performance")


def _strokes(performance: Performance):
    """Group events into strokes: a stroke starts at a new touch and extends
    while following events are flagged moving."""
    flags = classify_touch_state(performance)
    strokes = []
    for point, flag in zip(performance.events, flags):
        if flag == "new" or not strokes:
            strokes.append([point])
        else:
            strokes[-1].append(point)
    return strokes


def _layer_svg(performance, color, width, height):
    parts = []
    for stroke in _strokes(performance):
        pts = [(p[0] * width, p[1] * height) for p in stroke]
        if len(pts) == 1:
            x, y = pts[0]
            parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="{color}"/>')
        else:
            coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
            parts.append(
                f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>'
            )
    return parts


def render_performance(spec: PlotSpec) -> str:
    """Render a PlotSpec to an SVG string; byte-deterministic for fixed input."""
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{spec.width}" height="{spec.height}" '
        f'viewBox="0 0 {spec.width} {spec.height}">',
        f'<rect width="{spec.width}" height="{spec.height}" fill="white"/>',
    ]
    for perf in spec.performances:
        parts.extend(_layer_svg(perf, CALL_COLOR, spec.width, spec.height))
    for perf in spec.responses:
        parts.extend(_layer_svg(perf, RESPONSE_COLOR, spec.width, spec.height))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
