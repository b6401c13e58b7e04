"""Command-line interface.

Subcommands: prepare, train, train-classifier, generate, walks, eval,
analyze, collect. Report-producing paths write figures next to their
delimited/JSON outputs.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import audio, dataset, plots, ratings, stimuli, training
from .audio import SURFACE_NAMES
from .errors import StepganError


def _cmd_prepare(args) -> int:
    built = dataset.build_dataset(
        args.in_dir, onset_threshold=args.onset_threshold, target_dbfs=args.target_dbfs
    )
    manifest = dataset.write_prepared_dataset(
        built, args.out_dir, onset_threshold=args.onset_threshold, target_dbfs=args.target_dbfs
    )
    counts = ", ".join(f"{k}={v}" for k, v in sorted(built.class_counts.items()))
    print(f"prepared {len(built)} clips ({counts})")
    print(f"manifest: {manifest}")
    return 0


def _load_training_config(args) -> training.TrainingConfig:
    overrides = {}
    if args.config:
        overrides.update(json.loads(Path(args.config).read_text()))
    overrides["regime"] = args.regime
    if args.batches is not None:
        overrides["total_batches"] = args.batches
    if args.batch_size is not None:
        overrides["batch_size"] = args.batch_size
    if args.lr is not None:
        overrides["learning_rate"] = args.lr
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.checkpoint_every is not None:
        overrides["checkpoint_every"] = args.checkpoint_every
    if "betas" in overrides and overrides["betas"] is not None:
        overrides["betas"] = tuple(overrides["betas"])
    return training.TrainingConfig(**overrides)


def _cmd_train(args) -> int:
    from .models.generator import GeneratorConfig

    data = dataset.load_prepared_dataset(args.data)
    cfg = _load_training_config(args)
    gen_cfg = GeneratorConfig(base_channels=args.base_channels) if args.base_channels else None
    final = training.train(
        data, cfg, args.out_dir, gen_cfg=gen_cfg,
        resume_from=args.resume, progress_every=args.progress_every,
    )
    log = training.read_loss_log(Path(args.out_dir) / training.LOG_NAME)
    figure = plots.plot_loss_curves(log, Path(args.out_dir) / "loss_curves.png")
    print(f"final checkpoint: {final}")
    print(f"loss log: {Path(args.out_dir) / training.LOG_NAME}")
    print(f"loss curves: {figure}")
    return 0


def _cmd_train_classifier(args) -> int:
    from .classifier import ClassifierConfig, save_classifier, train_eval_classifier

    data = dataset.load_prepared_dataset(args.data)
    merged = dataset.remap_to_eval_classes(data)
    x, y = dataset.as_arrays(merged)
    cfg = ClassifierConfig(epochs=args.epochs, seed=args.seed)
    trained = train_eval_classifier(x, y, cfg, class_names=audio.EVAL_CLASS_NAMES)
    path = save_classifier(trained, args.out)
    print(f"validation accuracy: {trained.validation_accuracy:.3f}")
    print(f"classifier checkpoint: {path}")
    return 0


def _cmd_generate(args) -> int:
    class_id = (
        SURFACE_NAMES.index(args.class_name)
        if args.class_name in SURFACE_NAMES
        else int(args.class_name)
    )
    clips = stimuli.generate_samples(args.ckpt, class_id, args.n, args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    name = SURFACE_NAMES[class_id]
    for i, clip in enumerate(clips):
        audio.save_clip(clip, out / f"{name}_{args.seed}_{i:05d}.wav")
    print(f"wrote {len(clips)} clips to {out}")
    return 0


def _cmd_walks(args) -> int:
    method_dirs = json.loads(Path(args.conditions).read_text())
    out = Path(args.out_dir)
    for k in range(args.series):
        spec = stimuli.WalkSpec(
            duration_s=args.duration, interval_s=args.interval, seed=args.seed + k
        )
        manifest = stimuli.assemble_series(method_dirs, spec, out, series_id=f"series_{k:02d}")
        print(f"series {manifest.series_id}: {len(manifest.conditions)} walks")
    return 0


def _cmd_eval(args) -> int:
    from .classifier import load_classifier
    from .evaluation import evaluate, write_report

    def load_sets(pairs):
        sets = {}
        for spec in pairs:
            name, _, path = spec.partition("=")
            if not path:
                path = name
                name = Path(name).name
            wavs = sorted(Path(path).rglob("*.wav"))
            if not wavs:
                raise StepganError(f"no WAVs under {path}")
            sets[name] = [audio.load_clip(p) for p in wavs]
        return sets

    classifier = load_classifier(args.classifier)
    report = evaluate(
        load_sets(args.real),
        load_sets(args.generated),
        classifier,
        distance_extractor=args.extractor,
        is_samples=args.is_samples,
    )
    written = write_report(report, args.out, figures=not args.no_figures)
    for kind, path in written.items():
        print(f"{kind}: {path}")
    return 0


def _cmd_analyze(args) -> int:
    files = sorted(Path(args.ratings).glob("*.json"))
    pages, problems = ratings.load_ratings(files, strict=False)
    for path, reason in problems:
        print(f"skipped {path}: {reason}", file=sys.stderr)
    if args.require_experience:
        pages = [p for p in pages if p.experience.get("critical_listening")]
    result = ratings.apply_exclusions(
        pages,
        anchor=args.anchor,
        reference=args.reference,
        anchor_max=args.anchor_max,
        reference_min=args.reference_min,
    )
    stats = ratings.summarize(result.retained)
    out_json = Path(args.out)
    out_csv = out_json.with_suffix(".csv")
    ratings.write_summary(stats, result, out_json, out_csv)
    figure = plots.plot_rating_boxplot(stats, out_json.with_suffix(".png"))
    print(f"retained {len(result.retained)} pages, excluded {len(result.excluded)}")
    print(f"stats: {out_json}")
    print(f"csv: {out_csv}")
    print(f"boxplot: {figure}")
    return 0


def _cmd_collect(args) -> int:
    from .server import serve

    serve(args.out_dir, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stepgan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="ingest raw WAVs into the fixed training format")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", dest="out_dir", required=True)
    p.add_argument("--onset-threshold", type=float, default=audio.ONSET_THRESHOLD)
    p.add_argument("--target-dbfs", type=float, default=audio.TARGET_DBFS)
    p.set_defaults(fn=_cmd_prepare)

    p = sub.add_parser("train", help="train one of the two adversarial regimes")
    p.add_argument("--data", required=True, help="prepared dataset directory")
    p.add_argument("--regime", choices=training.REGIMES, required=True)
    p.add_argument("--out", dest="out_dir", required=True)
    p.add_argument("--batches", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--checkpoint-every", type=int)
    p.add_argument("--base-channels", type=int, help="generator width override")
    p.add_argument("--config", help="JSON file mirroring TrainingConfig")
    p.add_argument("--resume", help="trainer checkpoint to resume from")
    p.add_argument("--progress-every", type=int, default=0)
    p.set_defaults(fn=_cmd_train)

    p = sub.add_parser("train-classifier", help="train the 5-class spectrogram classifier")
    p.add_argument("--data", required=True, help="prepared dataset directory")
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_train_classifier)

    p = sub.add_parser("generate", help="synthesize samples from a checkpoint")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--class", dest="class_name", required=True)
    p.add_argument("-n", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", dest="out_dir", required=True)
    p.set_defaults(fn=_cmd_generate)

    p = sub.add_parser("walks", help="assemble listening-test walk series")
    p.add_argument("--conditions", required=True, help="JSON map condition -> clip folder")
    p.add_argument("--series", type=int, default=10)
    p.add_argument("--interval", type=float, default=0.5)
    p.add_argument("--duration", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", dest="out_dir", required=True)
    p.set_defaults(fn=_cmd_walks)

    p = sub.add_parser("eval", help="objective metric suite over clip folders")
    p.add_argument("--real", nargs="+", required=True, help="name=dir (or dir)")
    p.add_argument("--generated", nargs="+", required=True)
    p.add_argument("--classifier", required=True)
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--extractor", default="inception_variant")
    p.add_argument("--is-samples", type=int, default=3500)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("analyze", help="ratings exclusions + per-condition stats")
    p.add_argument("--ratings", required=True, help="directory of ratings JSON files")
    p.add_argument("--out", required=True, help="stats JSON path")
    p.add_argument("--anchor", default=ratings.ANCHOR_CONDITION)
    p.add_argument("--anchor-max", type=float, default=ratings.ANCHOR_MAX)
    p.add_argument("--reference", default=ratings.REFERENCE_CONDITION)
    p.add_argument("--reference-min", type=float, default=ratings.REFERENCE_MIN)
    p.add_argument("--require-experience", action="store_true")
    p.set_defaults(fn=_cmd_analyze)

    p = sub.add_parser("collect", help="serve the POST /results collection endpoint")
    p.add_argument("--out", dest="out_dir", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8077)
    p.set_defaults(fn=_cmd_collect)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except StepganError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
