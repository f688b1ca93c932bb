"""Why mixture outputs: fit a one-in, three-out inverse problem.

A plain regression collapses multimodal targets to their useless average.
A mixture density head instead learns one component per branch. This demo
trains a tiny network on the inverted noisy map x = t + 0.3 sin(2 pi t)
and prints the mixture it predicts at x = 0.5, where three branches of t
coexist.

Run:  python3 demos/04_mixture_density_basics.py   (~5 s)
"""

import numpy as np

from touchjam import autodiff as ad
from touchjam import mdn, nn


def main():
    rng = np.random.default_rng(7)
    n = 3000
    t = rng.uniform(0, 1, n)
    x = t + 0.3 * np.sin(2 * np.pi * t) + rng.uniform(-0.05, 0.05, n)

    m, hidden = 3, 24
    params = {
        "w1": nn.glorot_uniform(rng, 1, hidden, (1, hidden)),
        "b1": np.zeros(hidden),
        "w2": nn.glorot_uniform(rng, hidden, 3 * m, (hidden, 3 * m)),
        "b2": np.zeros(3 * m),
    }
    adam = nn.AdamState(learning_rate=5e-3)
    for step in range(2000):
        pv = {k: ad.Var(v) for k, v in params.items()}
        h = ad.tanh(ad.constant(x[:, None]) @ pv["w1"] + pv["b1"])
        raw = h @ pv["w2"] + pv["b2"]
        loss = mdn.nll_time_ad(raw, t, m) * (1.0 / n)
        loss.backward()
        grads = nn.clip_gradients({k: v.grad for k, v in pv.items()}, 10.0)
        nn.adam_update(params, grads, adam)
        if step % 500 == 0:
            print(f"step {step:4d}  loss {float(loss.value):.3f}")

    h = np.tanh(np.array([[0.5]]) @ params["w1"] + params["b1"])
    raw = (h @ params["w2"] + params["b2"])[0]
    predicted, _ = mdn.split_and_transform(np.concatenate([raw, np.zeros(6 * m)]), m)
    print("\nmixture at x = 0.5:")
    for w, mu, s in sorted(zip(predicted.weights, predicted.means, predicted.stds)):
        print(f"  weight {w:.3f}  mean {mu:.3f}  std {s:.3f}")
    print("three separated components — one per branch of the inverse map")


if __name__ == "__main__":
    main()
