"""Command line entry points: train, search, synth, eval.

Every command is driven by a JSON run config plus ``--seed``/``--out``
overrides, succeeds with exit code 0, and on a domain error exits nonzero
after printing a machine-readable ``{"error": code, "message": ...}``
object to stderr.  All outputs except wall-clock fields are reproducible
from (config, seed).
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from pathlib import Path

from . import dsp
from .checkpoint import load_checkpoint, save_checkpoint
from .config import RunConfig
from .errors import (ConfigError, FastTalkerError, MetricError, PhonemeError,
                     UnknownWordError)
from .frontend import load_corpus, phonemize
from .metrics.features import FeatureExtractor
from .metrics.report import REPORT_FIELDS, evaluate_model
from .model import FastTalker
from .nas.search import search_loop
from .nas.space import searched_preset
from .train import (Trainer, make_candidate_evaluator, make_candidate_trainer,
                    split_corpus, write_loss_curve)
from .wav import write_wav


def _load_run_config(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg = RunConfig.from_json({**cfg.to_json(), "seed": args.seed})
    return cfg


def _load_samples(cfg: RunConfig):
    if cfg.corpus is None:
        raise ConfigError("this command needs a corpus path in the config")
    path = Path(cfg.corpus)
    if not path.exists():
        raise ConfigError(f"corpus not found: {path}")
    return load_corpus(path)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_train(args) -> int:
    cfg = _load_run_config(args)
    out = _out_dir(args)
    train_samples, _, _ = split_corpus(_load_samples(cfg))
    if not train_samples:
        raise ConfigError("train split is empty")
    model = FastTalker(cfg.architecture(), seed=cfg.seed,
                       dropout=cfg.dropout)
    trainer = Trainer(model, train_samples, lr=cfg.optimizer.lr,
                      betas=cfg.optimizer.betas, eps=cfg.optimizer.eps,
                      seed=cfg.seed,
                      adversarial_weight=cfg.loss_weights.adversarial)
    records = trainer.train(cfg.epochs)
    write_loss_curve(out / "loss_curve.jsonl", records)
    save_checkpoint(out / "checkpoint.bin", model, trainer.optimizer,
                    run_config=cfg.to_json())
    last = records[-1]
    print(f"trained {cfg.epochs} epochs on {len(train_samples)} samples; "
          f"final total loss {last['total']:.6f}")
    print(f"wrote {out / 'checkpoint.bin'} and {out / 'loss_curve.jsonl'}")
    return 0


def cmd_search(args) -> int:
    cfg = _load_run_config(args)
    out = _out_dir(args)
    if args.preset:
        config = searched_preset()
        best = {"config": config.to_json(), "reward": None,
                "preset": "searched"}
        (out / "best_config.json").write_text(json.dumps(best, indent=2))
        print(f"wrote preset architecture to {out / 'best_config.json'}")
        return 0
    train_samples, val_samples, _ = split_corpus(_load_samples(cfg))
    if not train_samples or not val_samples:
        raise ConfigError("search needs non-empty train and val splits")
    nas = cfg.nas
    result = search_loop(
        cfg.search_space(), nas.budget,
        make_candidate_trainer(train_samples, lr=cfg.optimizer.lr,
                               dropout=cfg.dropout),
        make_candidate_evaluator(val_samples, FeatureExtractor(cfg.seed)),
        master_seed=cfg.seed, epochs=nas.candidate_epochs,
        batch_size=nas.batch_size, gamma=nas.gamma, lr=nas.lr,
        alpha=nas.alpha, beta=nas.beta,
        history_path=out / "history.jsonl",
        state_path=out / "search_state.bin", resume=args.resume)
    best = {"config": result.best_config.to_json(),
            "reward": result.best_reward,
            "alpha": result.alpha, "beta": result.beta}
    (out / "best_config.json").write_text(json.dumps(best, indent=2))
    print(f"searched {len(result.history)} candidates; "
          f"best reward {result.best_reward:.6f}")
    print(f"wrote {out / 'best_config.json'}, {out / 'history.jsonl'}, "
          f"{out / 'search_state.bin'}")
    return 0


def _phonemize_checked(text: str):
    """Phonemize, upgrading word-level failures to UnknownWordError so the
    caller learns every offending word at once."""
    try:
        return phonemize(text)
    except PhonemeError:
        bad = []
        for word in dict.fromkeys(
                re.findall(r"[^\W\d_]+'?[^\W\d_]*",
                           text.lower().replace("-", " "))):
            try:
                phonemize(word)
            except PhonemeError:
                bad.append(word)
        if bad:
            raise UnknownWordError(bad) from None
        raise


def cmd_synth(args) -> int:
    out = _out_dir(args)
    model, _, _ = load_checkpoint(args.checkpoint)
    sequence = _phonemize_checked(args.text)
    start = time.perf_counter()
    result = model.synthesize(sequence)
    wall = time.perf_counter() - start
    audio_seconds = result["waveform"].shape[0] / dsp.SAMPLE_RATE

    write_wav(out / "speech.wav", result["waveform"])
    with open(out / "motion.jsonl", "w", encoding="utf-8") as fh:
        for i, pose in enumerate(result["poses"]):
            fh.write(json.dumps({"t": i / dsp.GESTURE_FRAME_RATE,
                                 "pose": [float(v) for v in pose]}) + "\n")
    timing = {"wall_seconds": wall, "audio_seconds": audio_seconds,
              "sec_per_sec": wall / audio_seconds}
    (out / "timing.json").write_text(json.dumps(timing, indent=2))
    print(f"synthesized {audio_seconds:.2f}s of speech and "
          f"{len(result['poses'])} gesture frames")
    print(f"wrote {out / 'speech.wav'}, {out / 'motion.jsonl'}, "
          f"{out / 'timing.json'}")
    return 0


def cmd_eval(args) -> int:
    cfg = _load_run_config(args)
    out = _out_dir(args)
    model, _, _ = load_checkpoint(args.checkpoint)
    splits = dict(zip(("train", "val", "test"),
                      split_corpus(_load_samples(cfg))))
    samples = splits[args.split]
    if not samples:
        raise MetricError(f"{args.split} split is empty")
    report = evaluate_model(model, samples, FeatureExtractor(cfg.seed),
                            bench_repeats=args.bench_repeats)
    (out / "report.json").write_text(json.dumps(report.to_json(), indent=2))
    header = "".join(f"{name:>13}" for name in REPORT_FIELDS)
    values = "".join(f"{getattr(report, name):>13.6g}"
                     for name in REPORT_FIELDS)
    print(header)
    print(values)
    print(f"wrote {out / 'report.json'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fasttalker",
        description="Joint speech and gesture synthesis toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, checkpoint=False):
        p.add_argument("--config", help="run config JSON path")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--out", default="out", help="output directory")
        if checkpoint:
            p.add_argument("--checkpoint", required=True,
                           help="checkpoint file to load")

    p_train = sub.add_parser("train", help="train a model on a corpus")
    common(p_train)
    p_train.set_defaults(func=cmd_train)

    p_search = sub.add_parser("search",
                              help="run the architecture search")
    common(p_search)
    p_search.add_argument("--resume", action="store_true",
                          help="continue from a saved search state")
    p_search.add_argument("--preset", action="store_true",
                          help="emit the reference searched architecture "
                               "without searching")
    p_search.set_defaults(func=cmd_search)

    p_synth = sub.add_parser("synth", help="synthesize speech and gesture")
    common(p_synth, checkpoint=True)
    p_synth.add_argument("--text", required=True, help="input text")
    p_synth.set_defaults(func=cmd_synth)

    p_eval = sub.add_parser("eval", help="compute metrics on a split")
    common(p_eval, checkpoint=True)
    p_eval.add_argument("--split", choices=("train", "val", "test"),
                        default="test")
    p_eval.add_argument("--bench-repeats", type=int, default=3)
    p_eval.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FastTalkerError as exc:
        payload = {"error": exc.code, "message": str(exc)}
        if hasattr(exc, "words"):
            payload["words"] = exc.words
        print(json.dumps(payload), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
