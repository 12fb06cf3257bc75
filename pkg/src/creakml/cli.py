"""Command-line interface: ``creakml {synth,extract,evaluate,report}``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .cache import resolve_cache_dir
from .corpus import CreakLabel, SyntheticCorpusSpec, generate_synthetic_corpus
from .evaluation import read_run_logs
from .features import FeatureKind
from .ml import ClassifierKind, ClassifierSpec
from .pipeline import (ConfigError, ExperimentConfig, evaluate, extract_tables, load_samples,
                       resolve_manifest)
from .preprocess import PreprocessConfig
from .report import ExperimentReport, render_report

logger = logging.getLogger("creakml")

FEATURE_ALIASES = {"spec": "spectrogram", "spectrogram": "spectrogram", "mel": "melspectrogram",
                   "melspec": "melspectrogram", "melspectrogram": "melspectrogram", "mfcc": "mfcc"}


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return v


def _interval(text):
    try:
        lo, hi = (float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO,HI, got {text!r}") from None
    return lo, hi


def _feature_list(text):
    try:
        return [FEATURE_ALIASES[t.strip().lower()] for t in text.split(",") if t.strip()]
    except KeyError as exc:
        raise argparse.ArgumentTypeError(f"unknown feature {exc.args[0]!r}") from None


def _classifier_list(text):
    names = {k.value: k for k in ClassifierKind}
    out = []
    for t in text.split(","):
        t = t.strip().lower().replace("_", "-")
        if not t:
            continue
        if t not in names:
            raise argparse.ArgumentTypeError(f"unknown classifier {t!r} (choose from {', '.join(names)})")
        out.append(names[t])
    return out


def _seed_list(text):
    return [int(t) for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="creakml", description=__doc__)
    p.add_argument("-q", "--quiet", action="store_true", help="only log warnings and errors")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-q", "--quiet", action="store_true", default=argparse.SUPPRESS,
                        help="only log warnings and errors")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", parents=[common], help="generate a synthetic creaky-speech corpus")
    s.add_argument("--n-per-class", type=_positive_int, default=45)
    s.add_argument("--seed", type=int, default=7)
    s.add_argument("--sample-rate", type=_positive_int, default=16000)
    s.add_argument("--duration", type=float, default=20.0, help="seconds per recording")
    s.add_argument("--low", type=_interval, default=(0.0, 0.2), help="creak fraction interval LO,HI")
    s.add_argument("--high", type=_interval, default=(0.5, 0.9), help="creak fraction interval LO,HI")
    s.add_argument("--out", required=True, type=Path)

    for name, help_ in (("extract", "preprocess recordings and fill the feature cache"),
                        ("evaluate", "run the LOSO grid and write reports")):
        e = sub.add_parser(name, parents=[common], help=help_)
        e.add_argument("--config", type=Path, help="JSON experiment config")
        e.add_argument("--manifest", type=Path)
        e.add_argument("--synthetic", action="store_true",
                       help="use the default synthetic corpus when no manifest is given")
        e.add_argument("--out", type=Path, help="output directory")
        e.add_argument("--features", type=_feature_list)
        e.add_argument("--threshold-db", type=float)
        e.add_argument("--min-silence", type=float)
        e.add_argument("--target-rate", type=_positive_int)
        e.add_argument("--jobs", type=_positive_int, default=os.cpu_count() or 1)
        if name == "evaluate":
            e.add_argument("--classifiers", type=_classifier_list)
            e.add_argument("--seeds", type=_seed_list)

    r = sub.add_parser("report", parents=[common], help="re-render a report from per-run JSON logs")
    r.add_argument("--runs", type=Path, required=True, help="directory of run logs")
    r.add_argument("--out", type=Path, help="directory for report.md/report.csv (default: stdout)")
    r.add_argument("--format", choices=("markdown", "csv"), default="markdown")
    return p


def _merged_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    if args.manifest is not None:
        cfg.manifest = str(args.manifest)
    if cfg.manifest is None and (args.synthetic or cfg.synthetic is None):
        cfg.synthetic = cfg.synthetic or SyntheticCorpusSpec()
    if args.out is not None:
        cfg.output_dir = str(args.out)
    if args.features:
        cfg.features = args.features
    pre = cfg.preprocess
    cfg.preprocess = PreprocessConfig(
        args.threshold_db if args.threshold_db is not None else pre.threshold_db,
        args.min_silence if args.min_silence is not None else pre.min_silence_s,
        args.target_rate if args.target_rate is not None else pre.target_rate,
    )
    if getattr(args, "classifiers", None):
        by_kind = {c.kind: c for c in cfg.classifiers}
        cfg.classifiers = [by_kind.get(k, ClassifierSpec.default(k)) for k in args.classifiers]
    if getattr(args, "seeds", None):
        cfg.seeds = args.seeds
    cfg.__post_init__()
    cfg.validate()
    return cfg


def cmd_synth(args) -> int:
    spec = SyntheticCorpusSpec(args.n_per_class, args.sample_rate, args.duration, args.low,
                               args.high, args.seed)
    corpus = generate_synthetic_corpus(spec, args.out)
    n_low = sum(1 for c in corpus.intended if c == CreakLabel.LOW)
    print(corpus.manifest_path)
    print(f"Low: {n_low}  High: {len(corpus.intended) - n_low}")
    return 0


def cmd_extract(args) -> int:
    cfg = _merged_config(args)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(cfg.dumps())
    samples = load_samples(resolve_manifest(cfg), cfg.balance_seed)
    cache_dir = resolve_cache_dir(out / "cache")
    tables, hits = extract_tables([s.entry.path for s in samples], cfg.features, cfg.preprocess,
                                  cfg.feature_config, cache_dir, args.jobs)
    total = len(samples) * len(cfg.features)
    print(f"{len(samples)} recordings, {total} cache entries ({hits} hits) in {cache_dir}")
    for kind, table in tables.items():
        print(f"{FeatureKind(kind).value}: {table.shape[1]}")
    return 0


def cmd_evaluate(args) -> int:
    cfg = _merged_config(args)
    outcome = evaluate(cfg, n_jobs=args.jobs)
    for clf, feat in outcome.failed:
        logger.error("cell %s/%s failed", clf, feat)
    logger.info("report written to %s", outcome.output_dir / "report.md")
    return 1 if outcome.failed else 0


def cmd_report(args) -> int:
    runs = read_run_logs(args.runs)
    if not runs:
        logger.error("no run logs in %s", args.runs)
        return 1
    report = ExperimentReport.from_runs(runs)
    if args.out is None:
        sys.stdout.write(render_report(report, args.format))
        return 0
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "report.md").write_text(render_report(report, "markdown"))
    (args.out / "report.csv").write_text(render_report(report, "csv"))
    return 0


COMMANDS = {"synth": cmd_synth, "extract": cmd_extract, "evaluate": cmd_evaluate, "report": cmd_report}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ValueError, OSError, RuntimeError) as exc:
        logger.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
