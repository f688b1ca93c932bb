"""Acceptance suite: one test per acceptance criterion, each printing a
pass/fail line. Run with `pytest tests/test_acceptance.py -v -s`.
"""

import json
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from fastapi.testclient import TestClient
from scipy import stats

from touchjam import autodiff as ad
from touchjam import data, mdn, nn, responder, trainer
from touchjam.model import Model, ModelConfig, load_checkpoint
from touchjam.service import create_app
from tests.test_mdn import (
    nll_space_oracle,
    nll_time_oracle,
    random_params_1d,
    random_params_2d,
)


def report(name, ok, detail=""):
    print(f"[ACCEPTANCE] {name}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, f"{name} failed: {detail}"


# -- gradient correctness -------------------------------------------------


def test_gradient_correctness_full_model():
    """Full model (1 layer, 8 units, M=2), one 4-event window: every
    parameter gradient vs central finite differences through the
    independent numpy inference path."""
    t0 = time.monotonic()
    model = Model.build(ModelConfig(layer_count=1, units=8, mixtures=2), seed=42)
    rng = np.random.default_rng(0)
    window = rng.uniform(0, 1, size=(4, 3))
    window[:, 2] *= 0.5

    loss_var, param_vars = model.build_window_loss(window[None])
    loss_var.backward()
    analytic = {k: v.grad for k, v in param_vars.items()}

    def numpy_loss(params):
        m2 = Model(model.config, params)
        proj, _ = m2.forward_sequence(window[:-1])
        tp, sp = mdn.split_and_transform(proj, 2)
        return mdn.nll_space(sp, window[1:, 0], window[1:, 1]) + mdn.nll_time(tp, window[1:, 2])

    h = 1e-5
    worst = 0.0
    for name, p in model.params.items():
        flat = p.ravel()
        a_flat = analytic[name].ravel()
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = numpy_loss(model.params)
            flat[i] = orig - h
            down = numpy_loss(model.params)
            flat[i] = orig
            fd = (up - down) / (2.0 * h)
            # 1e-6 floor absorbs FD noise on near-zero gradients
            worst = max(worst, abs(a_flat[i] - fd) / max(abs(a_flat[i]), abs(fd), 1e-6))
    elapsed = time.monotonic() - t0
    report(
        "gradient-correctness",
        worst < 1e-4 and elapsed < 60.0,
        f"max rel err {worst:.2e}, {elapsed:.1f}s",
    )


# -- MDN oracle equivalence ----------------------------------------------


def test_mdn_oracle_equivalence():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(100):
        m = int(rng.integers(1, 5))
        n = int(rng.integers(1, 9))
        p2 = random_params_2d(rng, m, n)
        p1 = random_params_1d(rng, m, n)
        xs, ys = rng.uniform(0, 1, n), rng.uniform(0, 1, n)
        dts = rng.uniform(0, 2, n)
        worst = max(worst, abs(mdn.nll_space(p2, xs, ys) - nll_space_oracle(p2, xs, ys)))
        worst = max(worst, abs(mdn.nll_time(p1, dts) - nll_time_oracle(p1, dts)))
    # underflow regime: raw log-density ~ -745, naive densities are exactly 0
    p1 = mdn.MixtureParams1D(np.array([[1.0]]), np.array([[0.0]]), np.array([[1.0]]))
    under_time = mdn.nll_time(p1, [38.6])
    p2 = mdn.MixtureParams2D(
        np.array([[1.0]]), np.array([[0.0]]), np.array([[0.0]]),
        np.array([[1.0]]), np.array([[1.0]]), np.array([[0.0]]),
    )
    under_space = mdn.nll_space(p2, [27.5], [27.5])
    report(
        "mdn-oracle-equivalence",
        worst < 1e-9 and np.isfinite(under_time) and np.isfinite(under_space),
        f"max |diff| {worst:.2e}, underflow-regime losses {under_time:.1f}/{under_space:.1f}",
    )


# -- density normalization ------------------------------------------------


def test_density_normalization():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(20):
        m = int(rng.integers(1, 5))
        params = random_params_2d(rng, m, 1)
        lo_x = (params.means_x - 6 * params.stds_x).min()
        hi_x = (params.means_x + 6 * params.stds_x).max()
        lo_y = (params.means_y - 6 * params.stds_y).min()
        hi_y = (params.means_y + 6 * params.stds_y).max()
        gx = np.linspace(lo_x, hi_x, 400)
        gy = np.linspace(lo_y, hi_y, 400)
        xx, yy = np.meshgrid(gx, gy)
        density = np.zeros_like(xx)
        for j in range(m):
            density += params.weights[0, j] * mdn.pdf_bivariate_normal(
                xx, yy, params.means_x[0, j], params.means_y[0, j],
                params.stds_x[0, j], params.stds_y[0, j], params.correlations[0, j],
            )
        integral = np.trapezoid(np.trapezoid(density, gy, axis=0), gx)
        worst = max(worst, abs(integral - 1.0))
    report("density-normalization", worst < 0.01, f"max |integral - 1| {worst:.4f}")


# -- sampling statistics --------------------------------------------------


def test_sampling_statistics():
    n = 100_000
    # fixed 1D mixture
    p1 = mdn.MixtureParams1D(
        np.array([0.3, 0.7]), np.array([0.1, 1.2]), np.array([0.2, 0.4])
    )
    rng = np.random.default_rng(3)
    d1 = np.array([mdn.sample_mixture_1d(p1, rng) for _ in range(n)])
    mean1 = 0.3 * 0.1 + 0.7 * 1.2
    var1 = 0.3 * (0.2**2 + 0.1**2) + 0.7 * (0.4**2 + 1.2**2) - mean1**2
    ok_mean1 = abs(d1.mean() - mean1) < 3 * np.sqrt(var1 / n)

    # chi-square on 50 equal-probability bins against the analytic mixture CDF
    edges = np.quantile(d1, np.linspace(0, 1, 51))
    edges[0], edges[-1] = -np.inf, np.inf
    observed, _ = np.histogram(d1, bins=edges)
    cdf = lambda v: 0.3 * stats.norm.cdf(v, 0.1, 0.2) + 0.7 * stats.norm.cdf(v, 1.2, 0.4)
    expected = np.diff([cdf(e) for e in edges]) * n
    chi2 = ((observed - expected) ** 2 / expected).sum()
    p_val = 1.0 - stats.chi2.cdf(chi2, df=49)
    ok_chi = p_val > 0.001

    # fixed 2D mixture: mean and covariance vs analytic moments
    p2 = mdn.MixtureParams2D(
        np.array([0.4, 0.6]), np.array([0.2, 0.8]), np.array([0.7, 0.3]),
        np.array([0.15, 0.25]), np.array([0.2, 0.1]), np.array([0.5, -0.4]),
    )
    rng = np.random.default_rng(4)
    d2 = np.array([mdn.sample_mixture_2d(p2, rng) for _ in range(n)])
    mu = np.array(
        [(p2.weights * p2.means_x).sum(), (p2.weights * p2.means_y).sum()]
    )
    cov = np.zeros((2, 2))
    for j in range(2):
        cj = np.array(
            [
                [p2.stds_x[j] ** 2, p2.correlations[j] * p2.stds_x[j] * p2.stds_y[j]],
                [p2.correlations[j] * p2.stds_x[j] * p2.stds_y[j], p2.stds_y[j] ** 2],
            ]
        )
        mj = np.array([p2.means_x[j], p2.means_y[j]])
        cov += p2.weights[j] * (cj + np.outer(mj, mj))
    cov -= np.outer(mu, mu)

    ok_mean2 = True
    for k in range(2):
        se = d2[:, k].std() / np.sqrt(n)
        ok_mean2 &= abs(d2[:, k].mean() - mu[k]) < 3 * se
    emp_cov = np.cov(d2.T)
    ok_cov = True
    centered = d2 - d2.mean(axis=0)
    for a in range(2):
        for b in range(2):
            prod = centered[:, a] * centered[:, b]
            se = prod.std() / np.sqrt(n)
            ok_cov &= abs(emp_cov[a, b] - cov[a, b]) < 3 * se
    report(
        "sampling-statistics",
        ok_mean1 and ok_chi and ok_mean2 and ok_cov,
        f"chi2 p={p_val:.4f}",
    )


# -- multimodal learning (classic inverse problem) ------------------------


def test_multimodal_learning():
    """A small MDN trained on the inverted noisy map t -> t + 0.3 sin(2 pi t)
    must place separated heavy components at input 0.5."""
    rng = np.random.default_rng(7)
    n = 3000
    t = rng.uniform(0, 1, n)
    x = t + 0.3 * np.sin(2 * np.pi * t) + rng.uniform(-0.05, 0.05, n)

    m_count, hidden = 3, 24
    params = {
        "w1": nn.glorot_uniform(rng, 1, hidden, (1, hidden)),
        "b1": np.zeros(hidden),
        "w2": nn.glorot_uniform(rng, hidden, 3 * m_count, (hidden, 3 * m_count)),
        "b2": np.zeros(3 * m_count),
    }
    adam = nn.AdamState(learning_rate=5e-3)
    inputs = x[:, None]
    for _ in range(2000):
        pv = {k: ad.Var(v) for k, v in params.items()}
        h = ad.tanh(ad.constant(inputs) @ pv["w1"] + pv["b1"])
        raw = h @ pv["w2"] + pv["b2"]
        loss = mdn.nll_time_ad(raw, t, m_count) * (1.0 / n)
        loss.backward()
        grads = nn.clip_gradients({k: v.grad for k, v in pv.items()}, 10.0)
        nn.adam_update(params, grads, adam)

    h = np.tanh(np.array([[0.5]]) @ params["w1"] + params["b1"])
    raw = (h @ params["w2"] + params["b2"])[0]
    predicted, _ = mdn.split_and_transform(np.concatenate([raw, np.zeros(6 * m_count)]), m_count)
    heavy = predicted.means[predicted.weights > 0.2]
    separated = len(heavy) >= 2 and (heavy.max() - heavy.min()) > 0.3

    # oracle: conditional modes read directly off the generated data
    sel = t[np.abs(x - 0.5) < 0.02]
    modes = [sel[sel < 0.35].mean(), sel[(sel >= 0.35) & (sel < 0.65)].mean(), sel[sel >= 0.65].mean()]
    aligned = all(min(abs(mean - mode) for mode in modes) < 0.1 for mean in heavy)
    report(
        "multimodal-learning",
        separated and aligned,
        f"heavy means {np.sort(heavy)}, data modes {np.round(modes, 3)}",
    )


# -- desk-scale training analog -------------------------------------------


def test_desk_scale_training_analog(tmp_path):
    """32- and 64-unit models, 2 epochs on a >= 50k-event synthetic corpus:
    train and held-out validation loss both improve from the first
    checkpoint to the last."""
    t0 = time.monotonic()
    parts = [("tapper", 6000), ("swirler", 6000), ("mixed", 6000)] * 3
    train_perfs = data.synth_corpus(data.SynthSpec(parts), seed=11)
    total_events = sum(len(p) for p in train_perfs)
    assert total_events >= 50_000
    val_perfs = data.synth_corpus(
        data.SynthSpec([("tapper", 800), ("swirler", 800), ("mixed", 800)]), seed=99
    )
    examples = data.window_examples(train_perfs, window=256, stride=16)
    batches = data.make_batches(examples, batch=128, seed=11)

    ok = True
    details = []
    for units in (32, 64):
        ckpt_dir = tmp_path / f"u{units}"
        model = Model.build(ModelConfig(layer_count=1, units=units, mixtures=4), seed=units)
        hyper = trainer.TrainingHyper(
            learning_rate=1e-3, max_epochs=2, log_every=5, checkpoint_every=10
        )
        trainer.train(model, batches, hyper, checkpoint_dir=ckpt_dir)
        ckpts = sorted(ckpt_dir.glob("step*.tjm"))
        first, last = load_checkpoint(ckpts[0]), load_checkpoint(ckpts[-1])
        train_excerpt = train_perfs[:2]
        tr_first, tr_last = trainer.evaluate(first, train_excerpt), trainer.evaluate(last, train_excerpt)
        va_first, va_last = trainer.evaluate(first, val_perfs), trainer.evaluate(last, val_perfs)
        ok &= tr_last < tr_first and va_last < va_first
        details.append(
            f"{units}u train {tr_first:.2f}->{tr_last:.2f} val {va_first:.2f}->{va_last:.2f}"
        )
    elapsed = time.monotonic() - t0
    report(
        "desk-scale-training-analog",
        ok and elapsed < 1800.0,
        "; ".join(details) + f"; {elapsed:.0f}s",
    )


# -- generation contract --------------------------------------------------


def test_generation_contract():
    model = Model.build(ModelConfig(layer_count=1, units=16, mixtures=4), seed=5)
    call = data.Performance(
        np.array([[0.2, 0.2, 0.0], [0.4, 0.5, 0.3], [0.6, 0.4, 0.2]])
    )
    state = responder.condition(model, call)
    ok = True
    for seed in range(1000):
        gen = responder.generate(model, state, seed=seed)
        ev = gen.performance.events
        ok &= float(ev[:, 2].sum()) <= 5.0 + 1e-12
        ok &= bool((ev[:, :2] >= 0).all() and (ev[:, :2] <= 1).all())
        ok &= gen.touch_states == responder.classify_touch_state(gen.performance)
        if not ok:
            break
    a = responder.generate(model, state, seed=77)
    b = responder.generate(model, state, seed=77)
    identical = np.array_equal(a.performance.events, b.performance.events)
    report("generation-contract", ok and identical, "1000 seeded responses checked")


# -- checkpoint + pipeline determinism ------------------------------------


def test_checkpoint_and_pipeline_determinism(tmp_path):
    model = Model.build(ModelConfig(layer_count=1, units=8, mixtures=2), seed=9)
    from touchjam.model import save_checkpoint

    path = tmp_path / "m.tjm"
    save_checkpoint(model, path)
    loaded = load_checkpoint(path)
    ev = data.TouchEvent(0.3, 0.7, 0.2)
    tp_a, sp_a, _ = model.forward_step(ev, model.zero_state())
    tp_b, sp_b, _ = loaded.forward_step(ev, loaded.zero_state())
    bit_identical = (
        np.array_equal(tp_a.means, tp_b.means)
        and np.array_equal(tp_a.weights, tp_b.weights)
        and np.array_equal(sp_a.correlations, sp_b.correlations)
    )

    # full preprocess -> 50-step train, twice, same seed
    logs = []
    for _ in range(2):
        perfs = data.synth_corpus(data.SynthSpec([("mixed", 4000)]), seed=21)
        examples = data.window_examples(perfs, window=32, stride=4)
        batches = data.make_batches(examples, batch=32, seed=21)[:25]
        m = Model.build(ModelConfig(layer_count=1, units=8, mixtures=2), seed=21)
        hyper = trainer.TrainingHyper(learning_rate=1e-3, max_epochs=2, log_every=1)
        _, loss_log = trainer.train(m, batches, hyper)
        logs.append([(s, tl, vl) for s, tl, vl, _ in loss_log.rows])
    assert logs[0][-1][0] == 50
    report(
        "checkpoint-pipeline-determinism",
        bit_identical and logs[0] == logs[1],
        f"50-step LossLog rows identical: {logs[0] == logs[1]}",
    )


# -- service contract -----------------------------------------------------


def test_service_contract():
    model = Model.build(ModelConfig(layer_count=1, units=8, mixtures=2), seed=3)
    client = TestClient(create_app(model=model))
    body = {
        "performance": {
            "version": 1,
            "events": [
                {"x": 0.1, "y": 0.2, "t": 0.0, "moving": False},
                {"x": 0.3, "y": 0.4, "t": 0.5, "moving": True},
            ],
        },
        "seed": 42,
    }
    r = client.post("/api/v1/respond", json=body)
    ok = r.status_code == 200
    wire = r.json()["response"]
    prev_t = 0.0
    for ev in wire["events"]:
        ok &= 0.0 <= ev["x"] <= 1.0 and 0.0 <= ev["y"] <= 1.0 and prev_t <= ev["t"] <= 5.0
        prev_t = ev["t"]

    malformed = client.post(
        "/api/v1/respond", content=b"{", headers={"content-type": "application/json"}
    )
    empty = client.post(
        "/api/v1/respond", json={"performance": {"version": 1, "events": []}}
    )
    bad_range = client.post(
        "/api/v1/respond",
        json={"performance": {"version": 1, "events": [{"x": 2.0, "y": 0.1, "t": 0.0}]}},
    )
    ok &= malformed.status_code == 400
    ok &= empty.status_code == 400
    ok &= bad_range.status_code == 422

    with ThreadPoolExecutor(max_workers=8) as pool:
        bodies = list(
            pool.map(lambda _: client.post("/api/v1/respond", json=body).content, range(32))
        )
    ok &= len(set(bodies)) == 1
    report(
        "service-contract",
        bool(ok),
        f"codes 200/{malformed.status_code}/{empty.status_code}/{bad_range.status_code}, "
        f"32 concurrent bodies identical: {len(set(bodies)) == 1}",
    )
