from __future__ import annotations

import numpy as np

from .tree import best_split_sorted

ALPHA_CAP = 1.0


class AdaBoost:
    """Discrete SAMME boosting of depth-1 Gini stumps (two classes).

    Each round fits the weighted-Gini-optimal stump, computes its weighted
    error ``err`` and vote ``alpha = learning_rate * ln((1 - err) / err)``,
    multiplies the weights of misclassified samples by ``exp(alpha)`` and
    renormalizes. Boosting stops early on a perfect stump (kept with vote
    ``ALPHA_CAP``) or on a stump no better than chance (discarded, unless it
    is the first one).
    """

    stochastic = False

    def __init__(self, n_estimators=100, learning_rate=1.0):
        self.n_estimators = n_estimators
        self.learning_rate = learning_rate

    @staticmethod
    def _stump(xs, ys, ws, w, y, x):
        split = best_split_sorted(xs, ys, ws, np.arange(xs.shape[1]))
        if split is None:
            f, thr = 0, np.inf
        else:
            f, thr, _ = split
        left = x[:, f] <= thr
        labels = []
        for side in (left, ~left):
            w1 = w[side & (y == 1)].sum()
            w0 = w[side & (y == 0)].sum()
            labels.append(1 if w1 > w0 else 0)
        return f, thr, labels[0], labels[1]

    def fit(self, x, y):
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        n, d = x.shape
        order = np.argsort(x, axis=0, kind="stable")
        xs = np.take_along_axis(x, order, axis=0)
        ys = y[order].astype(np.float64)
        w = np.full(n, 1.0 / n)
        self.features_, self.thresholds_ = [], []
        self.left_labels_, self.right_labels_ = [], []
        self.alphas_, self.errors_ = [], []
        self.weight_history_ = [w.copy()]
        for _ in range(self.n_estimators):
            f, thr, ll, rl = self._stump(xs, ys, w[order], w, y, x)
            pred = np.where(x[:, f] <= thr, ll, rl)
            miss = pred != y
            err = float(w[miss].sum() / w.sum())
            if err >= 0.5:
                if not self.alphas_:
                    self._keep(f, thr, ll, rl, ALPHA_CAP, err)
                break
            if err <= 0.0:
                self._keep(f, thr, ll, rl, ALPHA_CAP, err)
                break
            alpha = self.learning_rate * np.log((1.0 - err) / err)
            self._keep(f, thr, ll, rl, alpha, err)
            w = w * np.exp(alpha * miss)
            w /= w.sum()
            self.weight_history_.append(w.copy())
        self.n_features_ = d
        self._freeze()
        return self

    def _keep(self, f, thr, ll, rl, alpha, err):
        self.features_.append(f)
        self.thresholds_.append(thr)
        self.left_labels_.append(ll)
        self.right_labels_.append(rl)
        self.alphas_.append(float(alpha))
        self.errors_.append(err)

    def _freeze(self):
        self.features_ = np.asarray(self.features_, dtype=np.intp)
        self.thresholds_ = np.asarray(self.thresholds_, dtype=np.float64)
        self.left_labels_ = np.asarray(self.left_labels_, dtype=np.int64)
        self.right_labels_ = np.asarray(self.right_labels_, dtype=np.int64)
        self.alphas_ = np.asarray(self.alphas_, dtype=np.float64)

    def decision_function(self, x):
        x = np.asarray(x, dtype=np.float64)
        h = np.where(x[:, self.features_] <= self.thresholds_, self.left_labels_, self.right_labels_)
        return (2 * h - 1) @ self.alphas_

    def predict(self, x):
        return (self.decision_function(x) > 0).astype(np.int64)

    def get_params(self):
        return {"n_estimators": self.n_estimators, "learning_rate": self.learning_rate}

    def get_state(self):
        return {"n_features": self.n_features_, "features": self.features_,
                "thresholds": self.thresholds_, "left_labels": self.left_labels_,
                "right_labels": self.right_labels_, "alphas": self.alphas_}

    def set_state(self, state):
        self.n_features_ = int(state["n_features"])
        self.features_ = np.asarray(state["features"], dtype=np.intp)
        self.thresholds_ = np.asarray(state["thresholds"], dtype=np.float64)
        self.left_labels_ = np.asarray(state["left_labels"], dtype=np.int64)
        self.right_labels_ = np.asarray(state["right_labels"], dtype=np.int64)
        self.alphas_ = np.asarray(state["alphas"], dtype=np.float64)
        return self
