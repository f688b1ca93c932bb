import numpy as np
import pytest

from touchjam.model import Model, ModelConfig


def finite_difference_grads(f, params, h=1e-5):
    """Central finite differences of scalar f(params) w.r.t. every entry of
    every array in `params`. The independent oracle for all gradient checks."""
    grads = {}
    for name, p in params.items():
        g = np.zeros_like(p)
        flat = p.ravel()
        gflat = g.ravel()
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = f(params)
            flat[i] = orig - h
            down = f(params)
            flat[i] = orig
            gflat[i] = (up - down) / (2.0 * h)
        grads[name] = g
    return grads


def max_relative_error(analytic, numeric, floor=1e-6):
    """Worst-case |a - n| / max(|a|, |n|, floor) over matching dicts."""
    worst = 0.0
    for name in analytic:
        a = np.asarray(analytic[name], dtype=float)
        n = np.asarray(numeric[name], dtype=float)
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


@pytest.fixture
def tiny_model():
    """1 layer, 8 units, M=2: small enough for exhaustive gradient checks."""
    return Model.build(ModelConfig(layer_count=1, units=8, mixtures=2), seed=42)
