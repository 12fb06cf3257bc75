"""End-to-end experiment: corpus -> preprocess -> features -> LOSO grid -> report."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .cache import FeatureCache, resolve_cache_dir
from .corpus import (SyntheticCorpusSpec, balance_classes, binarize_all, generate_synthetic_corpus,
                     load_manifest)
from .evaluation import DEFAULT_SEEDS, CellRequest, run_grid, write_run_logs
from .features import FeatureConfig, FeatureKind, extract_all
from .ml import ClassifierKind, ClassifierSpec
from .preprocess import PreprocessConfig, preprocess, read_wav
from .report import ExperimentReport, render_report

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    manifest: str | None = None
    synthetic: SyntheticCorpusSpec | None = None
    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    feature_config: FeatureConfig = field(default_factory=FeatureConfig)
    features: list = field(default_factory=lambda: [k.value for k in FeatureKind])
    classifiers: list = field(default_factory=lambda: [ClassifierSpec.default(k) for k in ClassifierKind])
    seeds: list = field(default_factory=lambda: list(DEFAULT_SEEDS))
    balance_seed: int = 0
    output_dir: str = "results"

    def __post_init__(self):
        self.features = [FeatureKind(f).value for f in self.features]
        self.classifiers = [c if isinstance(c, ClassifierSpec) else ClassifierSpec.from_dict(c)
                            for c in self.classifiers]
        self.seeds = [int(s) for s in self.seeds]
        if not self.features or not self.classifiers or not self.seeds:
            raise ConfigError("features, classifiers and seeds must be non-empty")

    def to_dict(self) -> dict:
        return {
            "manifest": self.manifest,
            "synthetic": None if self.synthetic is None else {
                k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self.synthetic).items()},
            "preprocess": asdict(self.preprocess),
            "feature_config": asdict(self.feature_config),
            "features": list(self.features),
            "classifiers": [c.to_dict() for c in self.classifiers],
            "seeds": list(self.seeds),
            "balance_seed": self.balance_seed,
            "output_dir": self.output_dir,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {"manifest", "synthetic", "preprocess", "feature_config", "features", "classifiers",
                 "seeds", "balance_seed", "output_dir"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
        syn = d.get("synthetic")
        if syn is not None:
            syn = dict(syn)
            for k in ("creak_fraction_low", "creak_fraction_high"):
                if k in syn:
                    syn[k] = tuple(syn[k])
            syn = SyntheticCorpusSpec(**syn)
        base = cls()
        return cls(
            manifest=d.get("manifest"),
            synthetic=syn,
            preprocess=PreprocessConfig(**d.get("preprocess", {})),
            feature_config=FeatureConfig(**d.get("feature_config", {})),
            features=d.get("features", base.features),
            classifiers=d.get("classifiers", base.classifiers),
            seeds=d.get("seeds", base.seeds),
            balance_seed=int(d.get("balance_seed", 0)),
            output_dir=d.get("output_dir", base.output_dir),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            d = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        cfg = cls.from_dict(d)
        if cfg.manifest is not None and not Path(cfg.manifest).is_absolute():
            cfg.manifest = str(path.parent / cfg.manifest)
        if not Path(cfg.output_dir).is_absolute():
            cfg.output_dir = str(path.parent / cfg.output_dir)
        cfg.validate()
        return cfg

    def validate(self):
        if self.manifest is None and self.synthetic is None:
            raise ConfigError("config needs either a manifest or a synthetic corpus spec")
        if self.manifest is not None and not Path(self.manifest).is_file():
            raise ConfigError(f"manifest not found: {self.manifest}")


def resolve_manifest(cfg: ExperimentConfig) -> Path:
    """The manifest to use; a synthetic corpus is generated under output_dir if needed."""
    if cfg.manifest is not None:
        return Path(cfg.manifest)
    corpus_dir = Path(cfg.output_dir) / "corpus"
    manifest = corpus_dir / "manifest.csv"
    if not manifest.exists():
        logger.info("generating synthetic corpus in %s", corpus_dir)
        generate_synthetic_corpus(cfg.synthetic, corpus_dir)
    return manifest


def load_samples(manifest, balance_seed: int = 0):
    entries = load_manifest(manifest)
    samples, excluded = binarize_all(entries)
    balanced = balance_classes(samples, balance_seed)
    logger.info("%d recordings, %d excluded at the boundary, %d after balancing",
                len(entries), excluded, len(balanced))
    return balanced


def _extract_one(args):
    path, kinds, pcfg, fcfg = args
    try:
        w = preprocess(read_wav(path), pcfg)
        return {k.value: v.values for k, v in extract_all(w, kinds, fcfg).items()}
    except Exception as exc:
        raise RuntimeError(f"{path}: {exc}") from None


def extract_tables(paths, kinds, pcfg: PreprocessConfig, fcfg: FeatureConfig, cache_dir=None,
                   n_jobs=1):
    """Feature matrices ``{kind: N x D}`` with rows in `paths` order.

    Cached vectors are reused; missing ones are computed (in parallel when
    ``n_jobs > 1``) and written to the cache. Returns the tables and the
    number of cache hits.
    """
    kinds = [FeatureKind(k) for k in kinds]
    cache = FeatureCache(cache_dir, fcfg, pcfg) if cache_dir is not None else None
    rows: list[dict] = [{} for _ in paths]
    todo = []
    hits = 0
    for i, p in enumerate(paths):
        missing = []
        for k in kinds:
            v = cache.get(p, k) if cache else None
            if v is None:
                missing.append(k)
            else:
                rows[i][k.value] = v
                hits += 1
        if missing:
            todo.append((i, missing))
    jobs = [(str(paths[i]), missing, pcfg, fcfg) for i, missing in todo]
    if n_jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(n_jobs) as ex:
            outs = list(ex.map(_extract_one, jobs))
    else:
        outs = [_extract_one(j) for j in jobs]
    for (i, _), out in zip(todo, outs):
        for k, v in out.items():
            rows[i][k] = v
            if cache:
                cache.put(paths[i], k, v)
    tables = {k.value: np.stack([r[k.value] for r in rows]) for k in kinds}
    for k in kinds:
        expected = fcfg.vector_dim(k)
        if tables[k.value].shape[1] != expected:
            raise ValueError(f"{k.value}: dimension {tables[k.value].shape[1]} != {expected}")
    return tables, hits


@dataclass
class EvaluationOutcome:
    report: ExperimentReport
    failed: list
    output_dir: Path


def evaluate(cfg: ExperimentConfig, n_jobs: int = 1) -> EvaluationOutcome:
    """Run the configured grid and write config.json, report.md, report.csv and runs/."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(cfg.dumps())
    manifest = resolve_manifest(cfg)
    samples = load_samples(manifest, cfg.balance_seed)
    tables, _ = extract_tables([s.entry.path for s in samples], cfg.features, cfg.preprocess,
                               cfg.feature_config, resolve_cache_dir(out / "cache"), n_jobs)
    y = np.array([int(s.label) for s in samples])
    requests = [CellRequest(f, spec) for spec in cfg.classifiers for f in cfg.features]
    results = run_grid(tables, y, samples, requests, cfg.seeds, n_jobs)
    runs, failed = [], []
    for (feature, clf), res in results.items():
        if isinstance(res, Exception):
            failed.append((clf, feature))
        else:
            runs.extend(res)
    runs_dir = out / "runs"
    if runs_dir.exists():
        for old in runs_dir.glob("*.json"):
            old.unlink()
    write_run_logs(runs, runs_dir)
    order = [s.kind for s in cfg.classifiers]
    report = ExperimentReport.from_runs(
        runs, classifiers=[c for c in ClassifierKind if c in order],
        features=[f for f in FeatureKind if f.value in cfg.features], failed=failed)
    (out / "report.md").write_text(render_report(report, "markdown"))
    (out / "report.csv").write_text(render_report(report, "csv"))
    return EvaluationOutcome(report, failed, out)
