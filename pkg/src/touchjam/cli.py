"""Operator command line: preprocess, synth, train, validate, respond, plot, serve.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path


from . import data, plotting, responder, service, trainer
from .container import ContainerError
from .model import Model, ModelConfig, load_checkpoint

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3

log = logging.getLogger("touchjam")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def write_corpus_csv(path, performances) -> None:
    """Write performances back out in the corpus CSV format (resolution 1,1)."""
    with open(path, "w") as fh:
        fh.write("# resolution:1,1\n")
        fh.write("time,x,y,performer\n")
        for perf in performances:
            t = 0.0
            name = perf.performer or "synth"
            for x, y, dt in perf.events:
                t += dt
                fh.write(f"{t:.6f},{x:.6f},{y:.6f},{name}\n")


def load_performances(path) -> list:
    """Load performances from a corpus CSV or a wire JSON file."""
    path = Path(path)
    if path.suffix == ".json":
        with open(path) as fh:
            obj = json.load(fh)
        try:
            return [service.parse_wire_performance(obj)]
        except service.WireError as exc:
            raise data.CorpusFormatError(f"{path}: {exc.detail}") from exc
    return data.ingest_corpus([path])


def _cmd_preprocess(args):
    performances = data.ingest_corpus(args.inputs)
    examples = data.window_examples(performances, window=args.window, stride=args.stride)
    data.save_dataset(args.out, examples)
    print(f"{len(examples)} examples of {args.window} events -> {args.out}")


def _cmd_synth(args):
    spec = data.SynthSpec([(p, args.events) for p in args.patterns])
    performances = data.synth_corpus(spec, seed=args.seed)
    write_corpus_csv(args.out, performances)
    total = sum(len(p) for p in performances)
    print(f"{len(performances)} synthetic performances, {total} events -> {args.out}")


def _build_model(args) -> Model:
    config = ModelConfig(layer_count=args.layers, units=args.units, mixtures=args.mixtures)
    return Model.build(config, seed=args.seed)


def _cmd_train(args):
    examples = data.load_dataset(args.data)
    batches = data.make_batches(examples, batch=args.batch, seed=args.seed)
    model = load_checkpoint(args.resume) if args.resume else _build_model(args)
    hyper = trainer.TrainingHyper(
        learning_rate=args.lr,
        max_epochs=args.epochs,
        clip_norm=args.clip_norm,
        checkpoint_every=args.checkpoint_every,
        log_every=args.log_every,
        seed=args.seed,
    )
    validation = load_performances(args.val) if args.val else None
    ckpt, loss_log = trainer.train(
        model, batches, hyper, validation=validation, checkpoint_dir=args.out
    )
    if args.log:
        loss_log.save_csv(args.log)
    last = loss_log.rows[-1]
    print(f"final checkpoint {ckpt}; step {last[0]} train loss {last[1]:.4f}")


def _cmd_validate(args):
    train_set = load_performances(args.train_corpus) if args.train_corpus else None
    val_set = load_performances(args.val_corpus)
    print(f"{'checkpoint':40s} {'units':>6s} {'steps':>8s} {'training':>10s} {'valid_n':>10s}")
    for path in args.checkpoints:
        model = load_checkpoint(path)
        train_loss = trainer.evaluate(model, train_set) if train_set else float("nan")
        val_loss = trainer.evaluate(model, val_set)
        print(
            f"{Path(path).name:40s} {model.config.units:6d} {model.training_steps:8d} "
            f"{train_loss:10.4f} {val_loss:10.4f}"
        )


def _cmd_respond(args):
    model = load_checkpoint(args.checkpoint)
    if args.unconditioned:
        state = model.zero_state()
        generated = responder.generate(model, state, args.seed)
        call = None
    else:
        if not args.call:
            raise data.CorpusFormatError("respond needs --call unless --unconditioned")
        call = load_performances(args.call)[0]
        generated = responder.respond(model, call, args.seed)
    wire = service.wire_performance(generated)
    out = json.dumps(wire, sort_keys=True, indent=2)
    if args.out:
        Path(args.out).write_text(out + "\n")
    else:
        print(out)


def _cmd_plot(args):
    calls = []
    for path in args.performance:
        calls.extend(load_performances(path))
    responses = []
    for path in args.response:
        responses.extend(load_performances(path))
    spec = plotting.PlotSpec(calls, responses, width=args.width, height=args.height)
    Path(args.out).write_text(plotting.render_performance(spec))
    print(f"wrote {args.out}")


def _cmd_serve(args):
    import uvicorn

    app = service.create_app(
        checkpoint_path=args.checkpoint,
        mappings=args.mappings.split(",") if args.mappings else None,
        cors_origin=args.cors_origin,
    )
    uvicorn.run(app, host=args.host, port=args.port)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="touchjam")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="ingest corpus CSVs into a windowed dataset cache")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out", required=True)
    p.add_argument("--window", type=int, default=data.WINDOW)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_preprocess)

    p = sub.add_parser("synth", help="generate a synthetic corpus CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--patterns", nargs="+", default=["tapper", "swirler", "mixed"])
    p.add_argument("--events", type=int, default=2000, help="events per pattern")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("train", help="train a model on a dataset cache")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True, help="checkpoint directory")
    p.add_argument("--layers", type=int, default=3)
    p.add_argument("--units", type=int, default=64)
    p.add_argument("--mixtures", type=int, default=16)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--lr", type=float, default=1e-4)
    p.add_argument("--batch", type=int, default=data.BATCH)
    p.add_argument("--clip-norm", type=float, default=10.0)
    p.add_argument("--checkpoint-every", type=int, default=100)
    p.add_argument("--log-every", type=int, default=10)
    p.add_argument("--log", help="write the loss log CSV here")
    p.add_argument("--val", help="held-out corpus CSV or wire JSON")
    p.add_argument("--resume", help="checkpoint to continue from")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("validate", help="score checkpoints on held-out performances")
    p.add_argument("checkpoints", nargs="+")
    p.add_argument("--val-corpus", required=True)
    p.add_argument("--train-corpus")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("respond", help="generate a response to a call performance")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--call", help="call performance (corpus CSV or wire JSON)")
    p.add_argument("--unconditioned", action="store_true", help="start from the centre, no call")
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_respond)

    p = sub.add_parser("plot", help="render performances to an SVG")
    p.add_argument("--performance", nargs="+", default=[], help="call layer files (blue)")
    p.add_argument("--response", nargs="+", default=[], help="response layer files (red)")
    p.add_argument("--out", required=True)
    p.add_argument("--width", type=int, default=400)
    p.add_argument("--height", type=int, default=400)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_plot)

    p = sub.add_parser("serve", help="run the call-and-response HTTP service")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--mappings", help="comma-separated sound mapping labels")
    p.add_argument("--cors-origin", default="*")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except (data.CorpusFormatError, ContainerError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (trainer.TrainingError, responder.GenerationError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
