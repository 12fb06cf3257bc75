"""Seven binary classifiers behind one train/predict interface.

>>> spec = ClassifierSpec.default("dt")
>>> model = train(spec, x_train, y_train)        # doctest: +SKIP
>>> labels = predict(model, x_test)              # doctest: +SKIP

`train` fits a `ZScoreScaler` on the training rows and stores it in the
returned `TrainedModel`; `predict` applies it before the classifier, so
callers always pass raw feature vectors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np

from ..corpus import CreakLabel
from .adaboost import AdaBoost
from .forest import RandomForest
from .logistic import LogisticRegression
from .mlp import MLP
from .scaler import ZScoreScaler, fit_scaler, transform
from .svm import SVM
from .tree import DecisionTree

MODEL_FORMAT = "creakml-model/1"


class ClassifierKind(str, Enum):
    SVM_LINEAR = "svm-linear"
    SVM_RBF = "svm-rbf"
    LR = "lr"
    ADABOOST = "adaboost"
    RF = "rf"
    DT = "dt"
    MLP = "mlp"

    @property
    def label(self) -> str:
        return _LABELS[self]


_LABELS = {
    ClassifierKind.SVM_LINEAR: "SVM (linear)",
    ClassifierKind.SVM_RBF: "SVM (RBF)",
    ClassifierKind.LR: "LR",
    ClassifierKind.ADABOOST: "Adaboost",
    ClassifierKind.RF: "RF",
    ClassifierKind.DT: "DT",
    ClassifierKind.MLP: "MLP",
}

# hyperparameters used in the reference experiments
DEFAULT_PARAMS = {
    ClassifierKind.SVM_LINEAR: {"C": 1.0},
    ClassifierKind.SVM_RBF: {"C": 1.0, "gamma": 0.1},
    ClassifierKind.RF: {"n_estimators": 100, "max_depth": None},
    ClassifierKind.MLP: {"hidden": 100, "alpha": 0.01},
    ClassifierKind.LR: {"C": 1.0},
    ClassifierKind.DT: {"max_depth": 5},
    ClassifierKind.ADABOOST: {"n_estimators": 100, "learning_rate": 1.0},
}


@dataclass(frozen=True)
class ClassifierSpec:
    kind: ClassifierKind
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", ClassifierKind(self.kind))
        merged = dict(DEFAULT_PARAMS[self.kind])
        unknown = set(self.params) - set(merged)
        if unknown:
            raise ValueError(f"{self.kind.value}: unknown hyperparameter(s) {sorted(unknown)}")
        merged.update(self.params)
        object.__setattr__(self, "params", merged)

    @classmethod
    def default(cls, kind, seed: int = 0) -> "ClassifierSpec":
        return cls(ClassifierKind(kind), {}, seed)

    def with_seed(self, seed: int) -> "ClassifierSpec":
        return replace(self, seed=int(seed))

    @property
    def stochastic(self) -> bool:
        return self.kind in (ClassifierKind.RF, ClassifierKind.MLP)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "params": dict(self.params), "seed": self.seed}

    @classmethod
    def from_dict(cls, d) -> "ClassifierSpec":
        return cls(ClassifierKind(d["kind"]), dict(d.get("params", {})), int(d.get("seed", 0)))


def make_estimator(spec: ClassifierSpec):
    p = spec.params
    k = spec.kind
    if k is ClassifierKind.SVM_LINEAR:
        return SVM("linear", C=p["C"])
    if k is ClassifierKind.SVM_RBF:
        return SVM("rbf", C=p["C"], gamma=p["gamma"])
    if k is ClassifierKind.RF:
        return RandomForest(p["n_estimators"], p["max_depth"], random_state=spec.seed)
    if k is ClassifierKind.MLP:
        return MLP(hidden=p["hidden"], alpha=p["alpha"], random_state=spec.seed)
    if k is ClassifierKind.LR:
        return LogisticRegression(C=p["C"])
    if k is ClassifierKind.DT:
        return DecisionTree(p["max_depth"])
    return AdaBoost(p["n_estimators"], p["learning_rate"])


@dataclass(frozen=True)
class TrainedModel:
    scaler: ZScoreScaler
    spec: ClassifierSpec
    estimator: object

    @property
    def n_features(self) -> int:
        return self.scaler.mean.shape[0]


def _check_dataset(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise ValueError("x must be N x D with one label per row")
    if x.shape[0] < 2 or len(np.unique(y)) != 2:
        raise ValueError("training data must contain both classes")
    if not np.all(np.isin(y, (0, 1))):
        raise ValueError("labels must be 0 (Low) or 1 (High)")
    if not np.all(np.isfinite(x)):
        raise ValueError("training features contain NaN or infinity")
    return x, y


def train(spec: ClassifierSpec, x, y, row_ids=None) -> TrainedModel:
    """Fit a z-score scaler on `x`, then the classifier on the scaled rows."""
    x, y = _check_dataset(x, y)
    scaler = fit_scaler(x, row_ids)
    est = make_estimator(spec).fit(scaler.transform(x), y)
    return TrainedModel(scaler, spec, est)


def predict(model: TrainedModel, x):
    """Labels for an N x D matrix, or a single `CreakLabel` for a D-vector."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    x2 = np.atleast_2d(x)
    if x2.shape[1] != model.n_features:
        raise ValueError(f"expected {model.n_features} features, got {x2.shape[1]}")
    labels = model.estimator.predict(model.scaler.transform(x2))
    return CreakLabel(int(labels[0])) if single else labels


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

class ModelFormatError(ValueError):
    pass


def _pack(obj, prefix, arrays):
    if isinstance(obj, dict):
        return {"dict": {k: _pack(v, f"{prefix}/{k}", arrays) for k, v in obj.items()}}
    if isinstance(obj, list):
        return {"list": [_pack(v, f"{prefix}/{i}", arrays) for i, v in enumerate(obj)]}
    arrays[prefix] = np.asarray(obj)
    return {"array": prefix}


def _unpack(layout, arrays):
    if "dict" in layout:
        return {k: _unpack(v, arrays) for k, v in layout["dict"].items()}
    if "list" in layout:
        return [_unpack(v, arrays) for v in layout["list"]]
    return arrays[layout["array"]]


def save_model(model: TrainedModel, path) -> Path:
    """Write one self-describing ``.npz`` file (spec, scaler and parameters)."""
    path = Path(path)
    arrays = {"scaler/mean": model.scaler.mean, "scaler/std": model.scaler.std,
              "scaler/rows": np.asarray(model.scaler.source_rows, dtype=np.int64)}
    layout = _pack(model.estimator.get_state(), "state", arrays)
    meta = {"format": MODEL_FORMAT, "spec": model.spec.to_dict(), "layout": layout}
    with open(path, "wb") as fh:
        np.savez(fh, __meta__=np.asarray(json.dumps(meta)), **arrays)
    return path


def load_model(path) -> TrainedModel:
    with np.load(path, allow_pickle=False) as z:
        if "__meta__" not in z.files:
            raise ModelFormatError(f"{path}: not a saved model")
        meta = json.loads(str(z["__meta__"]))
        if meta.get("format") != MODEL_FORMAT:
            raise ModelFormatError(f"{path}: format {meta.get('format')!r}, expected {MODEL_FORMAT!r}")
        arrays = {k: z[k] for k in z.files}
    spec = ClassifierSpec.from_dict(meta["spec"])
    rows = tuple(int(r) for r in arrays["scaler/rows"]) if "scaler/rows" in arrays else ()
    scaler = ZScoreScaler(arrays["scaler/mean"], arrays["scaler/std"], rows)
    est = make_estimator(spec).set_state(_unpack(meta["layout"], arrays))
    return TrainedModel(scaler, spec, est)


__all__ = [
    "AdaBoost", "ClassifierKind", "ClassifierSpec", "DecisionTree", "LogisticRegression", "MLP",
    "ModelFormatError", "RandomForest", "SVM", "TrainedModel", "ZScoreScaler", "fit_scaler",
    "load_model", "make_estimator", "predict", "save_model", "train", "transform",
]
