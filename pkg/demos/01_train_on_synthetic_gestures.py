"""Train a small gesture model on a synthetic touchscreen corpus.

Builds a mixed corpus of tappers and swirlers, windows it into training
examples, runs a short optimization, and reports how the average
negative log-likelihood per event improves.

Run from the repo root:  python3 demos/01_train_on_synthetic_gestures.py
"""

from pathlib import Path

from touchjam import data, trainer
from touchjam.model import Model, ModelConfig

OUT = Path("demo_output")


def main():
    OUT.mkdir(exist_ok=True)

    perfs = data.synth_corpus(
        data.SynthSpec([("tapper", 1500), ("swirler", 1500), ("mixed", 1500)]), seed=0
    )
    print(f"corpus: {len(perfs)} performances, {sum(len(p) for p in perfs)} events")

    examples = data.window_examples(perfs, window=64, stride=8)
    batches = data.make_batches(examples, batch=32, seed=0)
    print(f"{len(examples)} windows -> {len(batches)} batches of 32")

    model = Model.build(ModelConfig(layer_count=1, units=24, mixtures=4), seed=0)
    hyper = trainer.TrainingHyper(
        learning_rate=2e-3, max_epochs=2, log_every=5, checkpoint_every=20
    )
    final_path, loss_log = trainer.train(
        model, batches, hyper, checkpoint_dir=OUT / "checkpoints"
    )

    first, last = loss_log.rows[0], loss_log.rows[-1]
    print(f"loss per event: step {first[0]}: {first[1]:.3f}  ->  step {last[0]}: {last[1]:.3f}")
    loss_log.save_csv(OUT / "losses.csv")
    print(f"final checkpoint: {final_path}")


if __name__ == "__main__":
    main()
