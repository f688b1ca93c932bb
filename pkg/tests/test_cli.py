import json

import numpy as np
import pytest

from touchjam import cli
from touchjam.model import load_checkpoint


def run(argv):
    return cli.main(argv)


@pytest.fixture
def corpus_csv(tmp_path):
    path = tmp_path / "corpus.csv"
    assert run(["synth", "--out", str(path), "--events", "400", "--seed", "1"]) == 0
    return path


@pytest.fixture
def dataset(tmp_path, corpus_csv):
    path = tmp_path / "cache.tjd"
    code = run(
        ["preprocess", str(corpus_csv), "--out", str(path), "--window", "16", "--stride", "8"]
    )
    assert code == 0
    return path


@pytest.fixture
def checkpoint(tmp_path, dataset):
    out = tmp_path / "ckpts"
    code = run(
        [
            "train", "--data", str(dataset), "--out", str(out),
            "--layers", "1", "--units", "8", "--mixtures", "2",
            "--epochs", "1", "--batch", "16", "--lr", "0.001", "--seed", "2",
        ]
    )
    assert code == 0
    return out / "final.tjm"


class TestExitCodes:
    def test_unknown_flag_usage_error(self):
        assert run(["train", "--bogus"]) == cli.EXIT_USAGE

    def test_unknown_subcommand(self):
        assert run(["frobnicate"]) == cli.EXIT_USAGE

    def test_missing_file_data_error(self, tmp_path):
        assert run(
            ["preprocess", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "o.tjd")]
        ) == cli.EXIT_DATA

    def test_malformed_corpus_data_error(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("# resolution:10,10\ntime,x,y,performer\n1.0,a,b,c\n")
        assert run(
            ["preprocess", str(bad), "--out", str(tmp_path / "o.tjd")]
        ) == cli.EXIT_DATA


class TestTrainRespondPlot:
    def test_checkpoint_written(self, checkpoint):
        model = load_checkpoint(checkpoint)
        assert model.training_steps > 0

    def test_respond_conditioned(self, tmp_path, checkpoint, corpus_csv):
        out = tmp_path / "resp.json"
        code = run(
            [
                "respond", "--checkpoint", str(checkpoint), "--call", str(corpus_csv),
                "--seed", "3", "--out", str(out),
            ]
        )
        assert code == 0
        wire = json.loads(out.read_text())
        assert wire["version"] == 1
        assert all(ev["t"] <= 5.0 for ev in wire["events"])

    def test_respond_unconditioned_reproducible(self, tmp_path, checkpoint):
        outs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            code = run(
                [
                    "respond", "--checkpoint", str(checkpoint), "--unconditioned",
                    "--seed", "4", "--out", str(out),
                ]
            )
            assert code == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_plot_from_csv_and_response_json(self, tmp_path, checkpoint, corpus_csv):
        resp = tmp_path / "resp.json"
        run(["respond", "--checkpoint", str(checkpoint), "--call", str(corpus_csv),
             "--seed", "5", "--out", str(resp)])
        svg = tmp_path / "plot.svg"
        code = run(
            ["plot", "--performance", str(corpus_csv), "--response", str(resp),
             "--out", str(svg)]
        )
        assert code == 0
        text = svg.read_text()
        assert text.startswith("<svg") and "#d62728" in text

    def test_plot_byte_deterministic(self, tmp_path, corpus_csv):
        paths = [tmp_path / "p1.svg", tmp_path / "p2.svg"]
        for p in paths:
            assert run(["plot", "--performance", str(corpus_csv), "--out", str(p)]) == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_validate_prints_table(self, tmp_path, checkpoint, corpus_csv, capsys):
        code = run(
            ["validate", str(checkpoint), "--val-corpus", str(corpus_csv),
             "--train-corpus", str(corpus_csv)]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "training" in out and "valid_n" in out
        assert "final.tjm" in out

    def test_synth_deterministic_under_seed(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for p in (a, b):
            assert run(["synth", "--out", str(p), "--events", "100", "--seed", "7"]) == 0
        assert a.read_bytes() == b.read_bytes()
