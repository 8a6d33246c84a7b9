"""Command-line driver: process a program, train the mask model, or run
the HTTP service.

Exit codes: 0 success, 1 processing failure, 2 bad usage/arguments.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .jobs import InvalidJobSpecError, JobSpec, run_pipeline
from .masknet import MaskModel, compact_config, default_config
from .remix import UnknownPresetError, find_preset
from .synthdata import SynthDatasetConfig, synth_dataset
from .training import TrainConfig, TrainingDivergedError, train_desk

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clearspeech",
        description="Dialogue enhancement: separate, boost, remix, package.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("process", help="run the full pipeline on one WAV")
    p.add_argument("input", help="stereo WAV file (final mix)")
    p.add_argument("--backend", choices=("center", "model"), default="center")
    p.add_argument("--preset", default="Sprache betont")
    p.add_argument("--boost-db", type=float, default=2.0,
                   help="speech-band boost on the dialogue stem")
    p.add_argument("--checkpoint", help="model checkpoint (model backend)")
    p.add_argument("--out-dir", default="out")
    p.add_argument("--programme-name")

    t = sub.add_parser("train", help="train the mask model on synthetic data")
    t.add_argument("--items", type=int, default=16)
    t.add_argument("--duration-s", type=float, default=2.0)
    t.add_argument("--snr-db", type=float, nargs=2, default=(0.0, 6.0))
    t.add_argument("--epochs", type=int, default=50)
    t.add_argument("--learning-rate", type=float, default=0.2)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--model", choices=("compact", "budget"), default="compact",
                   help="compact trains fast; budget is the ~370k-param net")
    t.add_argument("--checkpoint-out", default="model.npz")
    t.add_argument("--loss-csv", default="loss_history.csv")

    s = sub.add_parser("serve", help="run the HTTP service for the UI")
    s.add_argument("--port", type=int, default=8000)
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--artifacts", default="artifacts")
    return parser


def cmd_process(args) -> int:
    try:
        find_preset(args.preset)
    except UnknownPresetError:
        print(f"error: unknown preset {args.preset!r}", file=sys.stderr)
        return EXIT_USAGE
    spec = JobSpec(input_path=args.input, backend=args.backend,
                   preset=args.preset, boost_db=args.boost_db,
                   checkpoint=args.checkpoint,
                   programme_name=args.programme_name)
    try:
        spec.validate()
    except InvalidJobSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        artifacts = run_pipeline(spec, Path(args.out_dir))
    except Exception as exc:
        print(f"processing failed: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return EXIT_FAILURE
    for name, path in artifacts.items():
        print(f"{name}: {path}")
    return EXIT_OK


def cmd_train(args) -> int:
    if args.epochs < 1:
        print("error: epochs must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    dataset = synth_dataset(SynthDatasetConfig(
        count=args.items, duration_s=args.duration_s,
        snr_range_db=tuple(args.snr_db), seed=args.seed))
    cfg = compact_config() if args.model == "compact" else default_config()
    import numpy as np
    model = MaskModel(cfg, rng=np.random.default_rng(args.seed),
                      dtype=np.float32)
    train_cfg = TrainConfig(epochs=args.epochs,
                            learning_rate=args.learning_rate, seed=args.seed)
    try:
        history = train_desk(model, dataset, cfg=train_cfg,
                             progress=lambda e, l: print(
                                 f"epoch {e}: loss {l:.6f}"))
    except TrainingDivergedError as exc:
        print(f"training diverged: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    model.save(args.checkpoint_out)
    with open(args.loss_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "loss"])
        for epoch, loss in enumerate(history):
            writer.writerow([epoch, repr(loss)])
    print(f"checkpoint: {args.checkpoint_out}")
    print(f"loss history: {args.loss_csv}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    app = create_app(artifact_dir=args.artifacts)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"process": cmd_process, "train": cmd_train,
               "serve": cmd_serve}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
