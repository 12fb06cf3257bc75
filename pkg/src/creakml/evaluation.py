"""Leave-one-speaker-out evaluation of classifiers on precomputed features."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

import numpy as np

from .ml import ClassifierSpec, predict, train

logger = logging.getLogger(__name__)

DEFAULT_SEEDS = tuple(range(10))


@dataclass(frozen=True)
class Fold:
    test_speaker: str
    train_indices: np.ndarray
    test_indices: np.ndarray


class FoldError(RuntimeError):
    pass


def _speaker_ids(samples) -> list[str]:
    return [s if isinstance(s, str) else s.speaker_id for s in samples]


def loso_folds(samples) -> list[Fold]:
    """One fold per distinct speaker, ordered by speaker id.

    `samples` may be `LabeledSample` objects or plain speaker id strings.
    """
    speakers = np.asarray(_speaker_ids(samples), dtype=object)
    distinct = sorted(set(speakers))
    if len(distinct) < 2:
        raise ValueError(f"LOSO needs at least 2 speakers, got {len(distinct)}")
    idx = np.arange(len(speakers))
    return [Fold(spk, idx[speakers != spk], idx[speakers == spk]) for spk in distinct]


@dataclass
class RunResult:
    feature: str
    classifier: str
    seed: int
    fold_speakers: list
    y_true: np.ndarray
    y_pred: np.ndarray
    fold_correct: list = field(default_factory=list)

    @property
    def correct(self) -> np.ndarray:
        return self.y_true == self.y_pred

    @property
    def accuracy(self) -> float:
        return float(self.correct.mean())

    def to_json(self) -> dict:
        return {
            "feature": self.feature,
            "classifier": self.classifier,
            "seed": self.seed,
            "accuracy": self.accuracy,
            "folds": [
                {"speaker": spk, "true": int(t), "pred": int(p)}
                for spk, t, p in zip(self.fold_speakers, self.y_true, self.y_pred)
            ],
        }

    @classmethod
    def from_json(cls, d) -> "RunResult":
        folds = d["folds"]
        r = cls(d["feature"], d["classifier"], int(d["seed"]),
                [f["speaker"] for f in folds],
                np.array([f["true"] for f in folds], dtype=np.int64),
                np.array([f["pred"] for f in folds], dtype=np.int64))
        r.fold_correct = [bool(c) for c in r.correct]
        return r


def run_fold(x, y, fold: Fold, spec: ClassifierSpec):
    """Scale on the fold's training rows, train, and predict its test rows."""
    model = train(spec, x[fold.train_indices], y[fold.train_indices], row_ids=fold.train_indices)
    return predict(model, x[fold.test_indices]), model


# worker-process state for parallel runs
_SHARED: dict = {}


def _init_worker(tables, y, folds):
    _SHARED.update(tables=tables, y=y, folds=folds)


def _fold_job(job):
    feature, spec_dict, fold_index = job
    fold = _SHARED["folds"][fold_index]
    spec = ClassifierSpec.from_dict(spec_dict)
    pred, _ = run_fold(_SHARED["tables"][feature], _SHARED["y"], fold, spec)
    return pred


def _run_jobs(jobs, tables, y, folds, n_jobs, executor=None):
    """Evaluate fold jobs, returning predictions (or exceptions) in job order."""
    if n_jobs <= 1 and executor is None:
        _init_worker(tables, y, folds)
        out = []
        for job in jobs:
            try:
                out.append(_fold_job(job))
            except Exception as exc:  # reported per run by the caller
                out.append(exc)
        return out
    own = executor is None
    if own:
        executor = ProcessPoolExecutor(n_jobs, initializer=_init_worker, initargs=(tables, y, folds))
    try:
        futures = [executor.submit(_fold_job, job) for job in jobs]
        out = []
        for f in futures:
            try:
                out.append(f.result())
            except Exception as exc:
                out.append(exc)
        return out
    finally:
        if own:
            executor.shutdown()


@dataclass(frozen=True)
class CellRequest:
    feature: str
    spec: ClassifierSpec


def run_grid(tables: dict, y, speakers, requests, seeds=DEFAULT_SEEDS, n_jobs=1,
             reuse_deterministic=True):
    """Run LOSO for every requested (feature, classifier) cell and seed.

    Returns ``{(feature, classifier): list[RunResult] | FoldError}``.
    Classifiers that use no randomness give the same predictions for every
    seed; with `reuse_deterministic` they are trained for the first seed only
    and the predictions are copied to the other seeds.
    """
    y = np.asarray(y, dtype=np.int64)
    speakers = _speaker_ids(speakers)
    folds = loso_folds(speakers)
    seeds = [int(s) for s in seeds]
    fold_speakers = [f.test_speaker for f in folds]
    test_index = np.concatenate([f.test_indices for f in folds])

    jobs, slots = [], []
    for req in requests:
        run_seeds = seeds[:1] if (reuse_deterministic and not req.spec.stochastic) else seeds
        for s in run_seeds:
            spec = req.spec.with_seed(s)
            for k in range(len(folds)):
                slots.append((req, s, k))
                jobs.append((req.feature, spec.to_dict(), k))
    tables = {k: np.asarray(v, dtype=np.float64) for k, v in tables.items()}
    outputs = _run_jobs(jobs, tables, y, folds, n_jobs)

    preds: dict = {}
    errors: dict = {}
    for (req, s, k), out in zip(slots, outputs):
        key = (req.feature, req.spec.kind.value)
        if isinstance(out, Exception):
            if key not in errors:
                errors[key] = FoldError(
                    f"{req.spec.kind.value}/{req.feature} seed {s}: fold {k} "
                    f"(speaker {folds[k].test_speaker}) failed: {out}")
            continue
        preds.setdefault((key, s), {})[k] = out

    results: dict = {}
    for req in requests:
        key = (req.feature, req.spec.kind.value)
        if key in errors:
            logger.error("%s", errors[key])
            results[key] = errors[key]
            continue
        runs = []
        for s in seeds:
            src = s if (key, s) in preds else seeds[0]
            per_fold = preds[(key, src)]
            y_pred = np.concatenate([np.asarray(per_fold[k]) for k in range(len(folds))])
            speakers_per_row = [fold_speakers[k] for k in range(len(folds))
                                for _ in folds[k].test_indices]
            r = RunResult(req.feature, req.spec.kind.value, s, speakers_per_row,
                          y[test_index], y_pred.astype(np.int64))
            r.fold_correct = [bool(np.all(per_fold[k] == y[folds[k].test_indices]))
                              for k in range(len(folds))]
            runs.append(r)
        results[key] = runs
    return results


def run_experiment(x, y, speakers, spec: ClassifierSpec, seeds=DEFAULT_SEEDS, feature="features",
                   n_jobs=1, reuse_deterministic=True) -> list[RunResult]:
    """LOSO runs of one classifier on one feature matrix, one run per seed.

    Raises `FoldError` naming the fold if any fold fails to train.
    """
    out = run_grid({feature: x}, y, speakers, [CellRequest(feature, spec)], seeds, n_jobs,
                   reuse_deterministic)[(feature, spec.kind.value)]
    if isinstance(out, Exception):
        raise out
    return out


def round_half_up(value: float, places: int = 1) -> float:
    q = Decimal(1).scaleb(-places)
    return float(Decimal(repr(round(float(value), 10))).quantize(q, rounding=ROUND_HALF_UP))


def aggregate(results) -> tuple[float, float]:
    """Mean and population std of run accuracies, in percent to one decimal."""
    acc = np.array([r.accuracy if isinstance(r, RunResult) else float(r) for r in results])
    if acc.size == 0:
        raise ValueError("aggregate needs at least one result")
    return round_half_up(100 * acc.mean()), round_half_up(100 * acc.std())


def write_run_logs(results, directory) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for r in results:
        p = directory / f"{r.classifier}__{r.feature}__seed{r.seed}.json"
        p.write_text(json.dumps(r.to_json(), indent=1) + "\n")
        paths.append(p)
    return paths


def read_run_logs(directory) -> list[RunResult]:
    return [RunResult.from_json(json.loads(p.read_text()))
            for p in sorted(Path(directory).glob("*.json"))]
