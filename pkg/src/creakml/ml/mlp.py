from __future__ import annotations

import logging

import numpy as np
from scipy.special import expit, log_expit

logger = logging.getLogger(__name__)


class MLP:
    """One hidden ReLU layer with a sigmoid output unit, trained with Adam.

    The training loss is mean binary cross-entropy plus
    ``alpha / (2 * batch) * sum(W**2)`` over both weight matrices. Weights are
    Glorot-uniform initialized and biases start at zero. Training stops after
    `max_iter` epochs, or earlier once the epoch loss has failed to improve by
    `tol` for `n_iter_no_change` consecutive epochs. The parameters with the
    lowest epoch loss are kept.
    """

    stochastic = True

    def __init__(self, hidden=100, alpha=0.01, learning_rate=1e-3, beta1=0.9, beta2=0.999,
                 epsilon=1e-8, batch_size=200, max_iter=200, tol=1e-4, n_iter_no_change=10,
                 random_state=0):
        self.hidden = hidden
        self.alpha = alpha
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.batch_size = batch_size
        self.max_iter = max_iter
        self.tol = tol
        self.n_iter_no_change = n_iter_no_change
        self.random_state = random_state

    def _forward(self, x, params):
        w1, b1, w2, b2 = params
        h = np.maximum(x @ w1 + b1, 0.0)
        return h, h @ w2 + b2

    def fit(self, x, y):
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        n, d = x.shape
        rng = np.random.default_rng(self.random_state)
        bound1 = np.sqrt(6.0 / (d + self.hidden))
        bound2 = np.sqrt(6.0 / (self.hidden + 1))
        params = [rng.uniform(-bound1, bound1, (d, self.hidden)), np.zeros(self.hidden),
                  rng.uniform(-bound2, bound2, self.hidden), np.zeros(())]
        m = [np.zeros_like(p) for p in params]
        v = [np.zeros_like(p) for p in params]
        batch = min(self.batch_size, n)
        step = 0
        best_loss, best_params, stall = np.inf, [p.copy() for p in params], 0
        self.loss_curve_ = []
        for epoch in range(self.max_iter):
            perm = rng.permutation(n)
            total = 0.0
            for start in range(0, n, batch):
                idx = perm[start:start + batch]
                xb, yb = x[idx], y[idx]
                nb = len(idx)
                h, z = self._forward(xb, params)
                s = 2.0 * yb - 1.0
                w1, _, w2, _ = params
                penalty = 0.5 * self.alpha * (np.sum(w1 * w1) + w2 @ w2) / nb
                total += (-log_expit(s * z).mean() + penalty) * nb
                dz = (expit(z) - yb) / nb
                dh = np.outer(dz, w2) * (h > 0)
                grads = [xb.T @ dh + self.alpha * w1 / nb, dh.sum(axis=0),
                         h.T @ dz + self.alpha * w2 / nb, dz.sum()]
                step += 1
                lr = self.learning_rate * np.sqrt(1 - self.beta2 ** step) / (1 - self.beta1 ** step)
                for p, g, mi, vi in zip(params, grads, m, v):
                    mi *= self.beta1
                    mi += (1 - self.beta1) * g
                    vi *= self.beta2
                    vi += (1 - self.beta2) * g * g
                    p -= lr * mi / (np.sqrt(vi) + self.epsilon)
            loss = total / n
            self.loss_curve_.append(loss)
            if loss > best_loss - self.tol:
                stall += 1
            else:
                stall = 0
            if loss < best_loss:
                best_loss = loss
                best_params = [p.copy() for p in params]
            if stall >= self.n_iter_no_change:
                break
        else:
            logger.debug("MLP reached max_iter=%d without meeting tol", self.max_iter)
        self.n_iter_ = len(self.loss_curve_)
        self.coefs_ = best_params
        self.n_features_ = d
        return self

    def decision_function(self, x):
        return self._forward(np.asarray(x, dtype=np.float64), self.coefs_)[1]

    def predict_proba(self, x):
        return expit(self.decision_function(x))

    def predict(self, x):
        return (self.predict_proba(x) > 0.5).astype(np.int64)

    def get_params(self):
        return {"hidden": self.hidden, "alpha": self.alpha, "learning_rate": self.learning_rate,
                "batch_size": self.batch_size, "max_iter": self.max_iter,
                "random_state": self.random_state}

    def get_state(self):
        w1, b1, w2, b2 = self.coefs_
        return {"n_features": self.n_features_, "w1": w1, "b1": b1, "w2": w2, "b2": b2}

    def set_state(self, state):
        self.n_features_ = int(state["n_features"])
        self.coefs_ = [np.asarray(state[k], dtype=np.float64) for k in ("w1", "b1", "w2", "b2")]
        return self
