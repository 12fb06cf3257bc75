import json

import numpy as np
import pytest

from creakml.corpus import CreakLabel
from creakml.ml import (DEFAULT_PARAMS, ClassifierKind, ClassifierSpec, ModelFormatError, fit_scaler,
                        load_model, predict, save_model, train)
from creakml.ml.adaboost import ALPHA_CAP, AdaBoost
from creakml.ml.forest import RandomForest, majority_vote
from creakml.ml.logistic import LogisticRegression, objective
from creakml.ml.mlp import MLP
from creakml.ml.svm import SVM, linear_kernel, rbf_kernel, smo
from creakml.ml.tree import DecisionTree, TreeArrays

from conftest import blobs

ALL_KINDS = list(ClassifierKind)


def holdout_accuracy(kind, seed=0):
    x, y = blobs(200, 4.0, seed)
    model = train(ClassifierSpec.default(kind, seed), x[:160], y[:160])
    return float(np.mean(predict(model, x[160:]) == y[160:]))


# --- scaler --------------------------------------------------------------------

def test_scaler_examples(rng):
    s = fit_scaler(np.array([[1.0], [2.0], [3.0]]))
    assert s.transform(np.array([[2.0]]))[0, 0] == 0.0
    c = fit_scaler(np.array([[5.0], [5.0]]))
    assert c.transform(np.array([[5.0]]))[0, 0] == 0.0
    assert np.isfinite(c.transform(np.array([[7.0]]))[0, 0])
    x = rng.standard_normal((50, 4)) * [1, 10, 100, 0.01] + [3, -2, 0, 7]
    z = fit_scaler(x).transform(x)
    np.testing.assert_allclose(z.mean(axis=0), 0.0, atol=1e-9)
    np.testing.assert_allclose(z.std(axis=0), 1.0, atol=1e-6)


def test_scaler_records_rows():
    s = fit_scaler(np.zeros((3, 2)), row_ids=[4, 7, 9])
    assert s.source_rows == (4, 7, 9)
    with pytest.raises(ValueError):
        fit_scaler(np.zeros((3, 2)), row_ids=[1])


# --- specs ---------------------------------------------------------------------

def test_default_hyperparameters():
    assert DEFAULT_PARAMS[ClassifierKind.SVM_RBF] == {"C": 1.0, "gamma": 0.1}
    assert DEFAULT_PARAMS[ClassifierKind.RF] == {"n_estimators": 100, "max_depth": None}
    assert DEFAULT_PARAMS[ClassifierKind.DT] == {"max_depth": 5}
    assert DEFAULT_PARAMS[ClassifierKind.ADABOOST] == {"n_estimators": 100, "learning_rate": 1.0}
    assert DEFAULT_PARAMS[ClassifierKind.MLP] == {"hidden": 100, "alpha": 0.01}
    spec = ClassifierSpec("dt", {"max_depth": 3})
    assert ClassifierSpec.from_dict(json.loads(json.dumps(spec.to_dict()))) == spec
    with pytest.raises(ValueError):
        ClassifierSpec("dt", {"depth": 3})


# --- separability and shared contract -----------------------------------------

@pytest.mark.parametrize("kind", ALL_KINDS)
def test_separable_blobs(kind):
    assert holdout_accuracy(kind) >= 0.95


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_predict_contract(kind, tmp_path):
    x, y = blobs(60, 6.0, 1)
    model = train(ClassifierSpec.default(kind), x, y)
    i = int(np.argmax(np.abs(x.sum(axis=1) - x.sum(axis=1).mean())))  # a point far from the boundary
    label = predict(model, x[i])
    assert isinstance(label, CreakLabel) and label == y[i]
    first = predict(model, x)
    np.testing.assert_array_equal(predict(model, x), first)
    with pytest.raises(ValueError):
        predict(model, np.zeros(3))
    loaded = load_model(save_model(model, tmp_path / "m.npz"))
    np.testing.assert_array_equal(predict(loaded, x), first)
    assert loaded.spec == model.spec
    assert loaded.scaler.source_rows == model.scaler.source_rows


def test_model_format_mismatch(tmp_path):
    x, y = blobs(40)
    p = save_model(train(ClassifierSpec.default("dt"), x, y), tmp_path / "m.npz")
    with np.load(p) as z:
        arrays = {k: z[k] for k in z.files}
    meta = json.loads(str(arrays["__meta__"]))
    meta["format"] = "creakml-model/0"
    arrays["__meta__"] = np.asarray(json.dumps(meta))
    np.savez(tmp_path / "old.npz", **arrays)
    with pytest.raises(ModelFormatError):
        load_model(tmp_path / "old.npz")
    np.savez(tmp_path / "junk.npz", a=np.zeros(2))
    with pytest.raises(ModelFormatError):
        load_model(tmp_path / "junk.npz")


def test_degenerate_training_data():
    spec = ClassifierSpec.default("lr")
    with pytest.raises(ValueError):
        train(spec, np.zeros((4, 2)), np.zeros(4))
    x = np.zeros((4, 2))
    x[0, 0] = np.nan
    with pytest.raises(ValueError):
        train(spec, x, np.array([0, 1, 0, 1]))


# --- AdaBoost -----------------------------------------------------------------

def test_adaboost_separable_trace():
    x = np.array([[1.0], [2.0], [3.0], [4.0]])
    y = np.array([0, 0, 1, 1])
    m = AdaBoost().fit(x, y)
    assert m.thresholds_.tolist() == [2.5]
    assert m.errors_ == [0.0]
    assert m.alphas_.tolist() == [ALPHA_CAP]
    np.testing.assert_array_equal(m.weight_history_[0], [0.25] * 4)
    np.testing.assert_array_equal(m.predict(x), y)


def test_adaboost_two_round_trace():
    # round 1: cut 1.5 (ties with 3.5, lower threshold wins), err 1/4, alpha ln 3
    # round 2: cut 3.5, err 1/6, alpha ln 5
    x = np.array([[1.0], [2.0], [3.0], [4.0]])
    y = np.array([0, 1, 0, 1])
    m = AdaBoost(n_estimators=2).fit(x, y)
    assert m.thresholds_.tolist() == [1.5, 3.5]
    np.testing.assert_allclose(m.errors_, [1 / 4, 1 / 6], rtol=0, atol=1e-12)
    np.testing.assert_allclose(m.alphas_, [np.log(3), np.log(5)], rtol=0, atol=1e-12)
    np.testing.assert_allclose(m.weight_history_[1], [1 / 6, 1 / 6, 1 / 2, 1 / 6], rtol=0, atol=1e-12)
    np.testing.assert_allclose(m.weight_history_[2], [0.1, 0.5, 0.3, 0.1], rtol=0, atol=1e-12)


def test_adaboost_weights_normalized(rng):
    x = rng.standard_normal((80, 3))
    y = (x[:, 0] + 0.8 * rng.standard_normal(80) > 0).astype(int)
    m = AdaBoost().fit(x, y)
    assert len(m.alphas_) > 2
    for w in m.weight_history_:
        assert abs(w.sum() - 1.0) <= 1e-12


def test_adaboost_stump_is_weighted_gini_optimal(rng):
    # brute force over every (feature, midpoint) for one weighted round
    x = rng.integers(0, 6, size=(30, 3)).astype(float)
    y = rng.integers(0, 2, size=30)
    m = AdaBoost(n_estimators=1).fit(x, y)
    best = None
    for f in range(3):
        vals = np.unique(x[:, f])
        for thr in (vals[:-1] + vals[1:]) / 2:
            score = 0.0
            for side in (x[:, f] <= thr, x[:, f] > thr):
                p = y[side].mean()
                score += side.sum() * 2 * p * (1 - p)
            if best is None or score < best[0] - 1e-12:
                best = (score, f, thr)
    assert (m.features_[0], m.thresholds_[0]) == (best[1], best[2])


# --- trees and forests --------------------------------------------------------

def test_dt_two_points():
    m = DecisionTree().fit(np.array([[0.0], [1.0]]), np.array([0, 1]))
    assert m.tree_.threshold[0] == 0.5 and m.tree_.depth() == 1
    np.testing.assert_array_equal(m.predict(np.array([[0.0], [1.0]])), [0, 1])


def test_dt_depth_limit(rng):
    x = rng.standard_normal((300, 5))
    y = rng.integers(0, 2, 300)
    assert DecisionTree().fit(x, y).tree_.depth() <= 5
    assert DecisionTree(max_depth=None).fit(x, y).tree_.depth() > 5


def test_dt_tie_breaks_to_lowest_feature():
    x = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
    m = DecisionTree().fit(x, np.array([0, 0, 1, 1]))
    assert m.tree_.feature[0] == 0 and m.tree_.threshold[0] == 1.5


@pytest.mark.parametrize("cls", [DecisionTree, RandomForest])
def test_split_models_affine_invariant(cls, rng):
    x = rng.standard_normal((120, 4))
    y = (x[:, 0] * x[:, 1] + 0.3 * x[:, 2] > 0).astype(int)
    probe = rng.standard_normal((50, 4))
    scale, shift = np.array([3.0, 0.5, 7.0, 2.0]), np.array([-1.0, 4.0, 0.0, 10.0])
    a = cls().fit(x, y).predict(probe)
    b = cls().fit(x * scale + shift, y).predict(probe * scale + shift)
    np.testing.assert_array_equal(a, b)


def test_rf_reproducible_and_seeded(rng):
    x = rng.standard_normal((100, 6))
    y = (x[:, 0] + 0.5 * rng.standard_normal(100) > 0).astype(int)
    probe = rng.standard_normal((200, 6))
    a = RandomForest(n_estimators=20, random_state=5).fit(x, y)
    b = RandomForest(n_estimators=20, random_state=5).fit(x, y)
    c = RandomForest(n_estimators=20, random_state=6).fit(x, y)
    np.testing.assert_array_equal(a.predict(probe), b.predict(probe))
    assert not np.array_equal(a.predict_proba(probe), c.predict_proba(probe))


def test_rf_tie_goes_low():
    assert majority_vote([[1, 0, 1], [0, 1, 1]]).tolist() == [0, 0, 1]
    rf = RandomForest(n_estimators=2)
    rf.trees_ = [TreeArrays([-1], [0.0], [-1], [-1], [float(v)]) for v in (1.0, 0.0)]
    assert rf.predict(np.zeros((3, 1))).tolist() == [0, 0, 0]


# --- logistic regression ------------------------------------------------------

def test_lr_symmetric_boundary():
    m = LogisticRegression().fit(np.array([[-1.0], [1.0]]), np.array([0, 1]))
    assert abs(m.intercept_) < 1e-6
    assert m.predict(np.array([[-1e-3], [1e-3]])).tolist() == [0, 1]


def test_lr_optimality_and_monotone_path(rng):
    x = rng.standard_normal((150, 10))
    y = (x @ rng.standard_normal(10) + rng.standard_normal(150) > 0).astype(float)
    m = LogisticRegression().fit(x, y)
    params = np.concatenate([m.coef_, [m.intercept_]])
    _, grad = objective(params, x, y, 1.0)
    assert np.linalg.norm(grad) <= 1e-5
    assert np.all(np.diff(m.loss_path_) <= 1e-10)


def test_lr_gradient_matches_finite_differences(rng):
    x = rng.standard_normal((20, 3))
    y = rng.integers(0, 2, 20).astype(float)
    p = rng.standard_normal(4)
    _, g = objective(p, x, y, 0.7)
    eps = 1e-6
    num = [(objective(p + eps * e, x, y, 0.7)[0] - objective(p - eps * e, x, y, 0.7)[0]) / (2 * eps)
           for e in np.eye(4)]
    np.testing.assert_allclose(g, num, rtol=1e-6, atol=1e-7)


# --- SVM ----------------------------------------------------------------------

def kkt_violation(K, y, alpha, b, C):
    yf = y * ((alpha * y) @ K + b)
    lower = alpha <= 0
    upper = alpha >= C
    free = ~lower & ~upper
    v = np.concatenate([np.maximum(0, 1 - yf[lower]), np.maximum(0, yf[upper] - 1),
                        np.abs(yf[free] - 1)])
    return v.max()


@pytest.mark.parametrize("kernel", ["linear", "rbf"])
def test_svm_kkt(kernel, rng):
    x = rng.standard_normal((120, 3))
    y = np.where(x[:, 0] + 0.5 * x[:, 1] + 0.4 * rng.standard_normal(120) > 0, 1.0, -1.0)
    K = linear_kernel(x, x) if kernel == "linear" else rbf_kernel(x, x, 0.5)
    alpha, b, _, converged = smo(K, y, 1.0)
    assert converged
    assert kkt_violation(K, y, alpha, b, 1.0) <= 1e-3
    assert abs(alpha @ y) < 1e-10


def test_svm_identity_kernel_analytic():
    # K = I: alpha_i = 1 + lam * y_i with sum y_i alpha_i = 0
    y = np.array([1.0, 1.0, 1.0, -1.0, -1.0])
    alpha, b, _, _ = smo(np.eye(5), y, C=10.0, tol=1e-10)
    np.testing.assert_allclose(alpha, [0.8, 0.8, 0.8, 1.2, 1.2], atol=1e-9)
    assert b == pytest.approx(0.2, abs=1e-9)


def test_svm_identity_kernel_box_bound():
    # C = 1 with 45 vs 44: the minority sits at C, the majority at 44/45,
    # so the bias points to the majority class by 1/45
    y = np.concatenate([np.ones(45), -np.ones(44)])
    alpha, b, _, _ = smo(np.eye(89), y, C=1.0, tol=1e-10)
    np.testing.assert_allclose(alpha[:45], 44 / 45, atol=1e-9)
    np.testing.assert_allclose(alpha[45:], 1.0, atol=1e-12)
    assert b == pytest.approx(1 / 45, abs=1e-9)


def test_svm_linear_weights(rng):
    x, y = blobs(100, 6.0, 2)
    m = SVM("linear").fit(x, y)
    np.testing.assert_allclose(x @ m.coef_ + m.intercept_,
                               linear_kernel(x, m.support_vectors_) @ m.dual_coef_ + m.intercept_)


# --- MLP ----------------------------------------------------------------------

def test_mlp_seeded(rng):
    x, y = blobs(120, 3.0, 4)
    a = MLP(random_state=1).fit(x, y)
    b = MLP(random_state=1).fit(x, y)
    c = MLP(random_state=2).fit(x, y)
    np.testing.assert_array_equal(a.predict_proba(x), b.predict_proba(x))
    assert not np.array_equal(a.predict_proba(x), c.predict_proba(x))
    assert 1 <= a.n_iter_ <= 200
    assert a.loss_curve_[-1] < a.loss_curve_[0]
