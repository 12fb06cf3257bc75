"""Soft-margin SVM trained with SMO using second-order working-set selection.

The dual problem is::

    min_a  1/2 a'Qa - sum(a)   s.t.  0 <= a_i <= C,  y'a = 0

with ``Q_ij = y_i y_j K(x_i, x_j)`` and ``y in {-1, +1}``. Pairs are chosen
as in Fan, Chen & Lin (2005) and optimization stops once the maximal KKT
violation ``m(a) - M(a)`` drops below `tol`.
"""

from __future__ import annotations

import logging

import numpy as np

logger = logging.getLogger(__name__)

TAU = 1e-12


def linear_kernel(a, b, gamma=None):
    return a @ b.T


def rbf_kernel(a, b, gamma):
    sq = (a * a).sum(axis=1)[:, None] + (b * b).sum(axis=1)[None, :] - 2.0 * a @ b.T
    return np.exp(-gamma * np.maximum(sq, 0.0))


KERNELS = {"linear": linear_kernel, "rbf": rbf_kernel}


def smo(K, y, C, tol=1e-3, max_iter=None):
    """Solve the SVM dual for a precomputed kernel matrix.

    Returns ``(alpha, b, n_iter, converged)``; the decision function is
    ``sum_j alpha_j y_j K(x_j, x) + b``.
    """
    n = len(y)
    y = np.asarray(y, dtype=np.float64)
    Q = K * np.outer(y, y)
    diag = np.diag(K).copy()
    alpha = np.zeros(n)
    grad = -np.ones(n)
    max_iter = max(10_000_000, 100 * n) if max_iter is None else max_iter
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        pos, neg = y > 0, ~(y > 0)
        at_upper, at_lower = alpha >= C, alpha <= 0
        i_up = (pos & ~at_upper) | (neg & ~at_lower)
        i_low = (pos & ~at_lower) | (neg & ~at_upper)
        score = -y * grad
        if not i_up.any() or not i_low.any():
            converged = True
            break
        up_scores = np.where(i_up, score, -np.inf)
        i = int(np.argmax(up_scores))
        m = up_scores[i]
        big_m = np.min(np.where(i_low, score, np.inf))
        if m - big_m < tol:
            converged = True
            break
        cand = i_low & (score < m)
        b_it = m - score
        a_it = diag[i] + diag - 2.0 * K[i]
        a_it = np.where(a_it > 0, a_it, TAU)
        gain = np.where(cand, -(b_it * b_it) / a_it, np.inf)
        j = int(np.argmin(gain))
        # step along a_i += y_i t, a_j -= y_j t, which keeps y'a fixed
        t = b_it[j] / a_it[j]
        t = min(t, C - alpha[i] if y[i] > 0 else alpha[i])
        t = min(t, alpha[j] if y[j] > 0 else C - alpha[j])
        old_i, old_j = alpha[i], alpha[j]
        alpha[i] = min(max(old_i + y[i] * t, 0.0), C)
        alpha[j] = min(max(old_j - y[j] * t, 0.0), C)
        grad += Q[:, i] * (alpha[i] - old_i) + Q[:, j] * (alpha[j] - old_j)
    else:
        logger.warning("SMO hit the iteration cap (%d) before reaching tol=%g", max_iter, tol)
    score = -y * grad
    free = (alpha > 0) & (alpha < C)
    if free.any():
        b = float(score[free].mean())
    else:
        pos, neg = y > 0, ~(y > 0)
        i_up = (pos & (alpha < C)) | (neg & (alpha > 0))
        i_low = (pos & (alpha > 0)) | (neg & (alpha < C))
        hi = score[i_up].max() if i_up.any() else score[i_low].min()
        lo = score[i_low].min() if i_low.any() else hi
        b = float((hi + lo) / 2.0)
    return alpha, b, it, converged


class SVM:
    stochastic = False

    def __init__(self, kernel="linear", C=1.0, gamma=0.1, tol=1e-3, max_iter=None):
        if kernel not in KERNELS:
            raise ValueError(f"unknown kernel {kernel!r}")
        self.kernel = kernel
        self.C = C
        self.gamma = gamma
        self.tol = tol
        self.max_iter = max_iter

    def _k(self, a, b):
        return KERNELS[self.kernel](a, b, self.gamma)

    def fit(self, x, y):
        x = np.asarray(x, dtype=np.float64)
        ys = np.where(np.asarray(y) > 0, 1.0, -1.0)
        K = self._k(x, x)
        alpha, b, self.n_iter_, self.converged_ = smo(K, ys, self.C, self.tol, self.max_iter)
        sv = alpha > 0
        self.support_vectors_ = x[sv]
        self.dual_coef_ = alpha[sv] * ys[sv]
        self.alpha_ = alpha
        self.intercept_ = b
        self.n_features_ = x.shape[1]
        self.coef_ = self.dual_coef_ @ self.support_vectors_ if self.kernel == "linear" else None
        return self

    def decision_function(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.coef_ is not None:
            return x @ self.coef_ + self.intercept_
        if len(self.dual_coef_) == 0:
            return np.full(x.shape[0], self.intercept_)
        return self._k(x, self.support_vectors_) @ self.dual_coef_ + self.intercept_

    def predict(self, x):
        return (self.decision_function(x) > 0).astype(np.int64)

    def get_params(self):
        return {"kernel": self.kernel, "C": self.C, "gamma": self.gamma, "tol": self.tol}

    def get_state(self):
        return {"n_features": self.n_features_, "support_vectors": self.support_vectors_,
                "dual_coef": self.dual_coef_, "intercept": self.intercept_}

    def set_state(self, state):
        self.n_features_ = int(state["n_features"])
        self.support_vectors_ = np.asarray(state["support_vectors"], dtype=np.float64).reshape(-1, self.n_features_)
        self.dual_coef_ = np.asarray(state["dual_coef"], dtype=np.float64)
        self.intercept_ = float(state["intercept"])
        self.coef_ = self.dual_coef_ @ self.support_vectors_ if self.kernel == "linear" else None
        return self
