"""Render a call-and-response duet as an SVG: call in blue, response in red.

Run:  python3 demos/03_plot_duet.py
Writes demo_output/duet.svg.
"""

from pathlib import Path

import numpy as np

from touchjam import plotting, responder
from touchjam.data import Performance
from touchjam.model import Model, ModelConfig

OUT = Path("demo_output")


def main():
    OUT.mkdir(exist_ok=True)
    model = Model.build(ModelConfig(layer_count=1, units=16, mixtures=4), seed=1)

    call = Performance(
        np.array(
            [[0.1, 0.1, 0.0], [0.2, 0.15, 0.05], [0.3, 0.25, 0.05],
             [0.7, 0.7, 0.6], [0.75, 0.75, 0.05]]
        )
    )
    gen = responder.respond(model, call, seed=7)

    svg = plotting.render_performance(
        plotting.PlotSpec([call], [gen.performance], width=400, height=400)
    )
    path = OUT / "duet.svg"
    path.write_text(svg)
    print(f"wrote {path}: call in {plotting.CALL_COLOR}, response in {plotting.RESPONSE_COLOR}")
    print(f"strokes render as dots (taps) or polylines (drags); y runs downward")


if __name__ == "__main__":
    main()
