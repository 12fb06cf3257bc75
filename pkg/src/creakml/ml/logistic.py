from __future__ import annotations

import logging

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit, log_expit

logger = logging.getLogger(__name__)


def objective(params, x, y, C):
    """``1/2 |w|^2 + C * sum_i logloss_i`` and its gradient; the intercept is not penalized.

    `params` is ``[w..., b]`` and `y` holds 0/1 labels.
    """
    w, b = params[:-1], params[-1]
    z = x @ w + b
    s = 2.0 * y - 1.0
    loss = 0.5 * w @ w - C * log_expit(s * z).sum()
    # d/dz of -log sigmoid(s z) is -s * sigmoid(-s z)
    r = -C * s * expit(-s * z)
    grad = np.concatenate([w + x.T @ r, [r.sum()]])
    return loss, grad


class LogisticRegression:
    """L2-regularized logistic regression fitted with L-BFGS.

    Fitting continues until the Euclidean norm of the objective gradient is
    at most `tol`; the objective value after every iteration is kept in
    ``loss_path_``.
    """

    stochastic = False

    def __init__(self, C=1.0, tol=1e-5, max_iter=1000):
        self.C = C
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, x, y):
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        params = np.zeros(x.shape[1] + 1)
        path = [objective(params, x, y, self.C)[0]]

        def record(intermediate_result):
            path.append(float(intermediate_result.fun))

        # the inf-norm test is tightened so the 2-norm target is met; restarts
        # cover the rare case where L-BFGS stalls on its relative-decrease test
        gtol = self.tol / np.sqrt(params.size)
        for _ in range(5):
            res = minimize(objective, params, args=(x, y, self.C), jac=True, method="L-BFGS-B",
                           callback=record,
                           options={"gtol": gtol, "ftol": 1e-15, "maxiter": self.max_iter, "maxcor": 20})
            params = res.x
            gnorm = float(np.linalg.norm(res.jac))
            if gnorm <= self.tol:
                break
        else:
            logger.warning("logistic regression stopped at gradient norm %.3g (> %g)", gnorm, self.tol)
        self.coef_, self.intercept_ = params[:-1].copy(), float(params[-1])
        self.grad_norm_ = gnorm
        self.loss_path_ = np.asarray(path)
        self.n_features_ = x.shape[1]
        return self

    def decision_function(self, x):
        return np.asarray(x, dtype=np.float64) @ self.coef_ + self.intercept_

    def predict_proba(self, x):
        return expit(self.decision_function(x))

    def predict(self, x):
        return (self.predict_proba(x) > 0.5).astype(np.int64)

    def get_params(self):
        return {"C": self.C, "tol": self.tol}

    def get_state(self):
        return {"n_features": self.n_features_, "coef": self.coef_, "intercept": self.intercept_}

    def set_state(self, state):
        self.n_features_ = int(state["n_features"])
        self.coef_ = np.asarray(state["coef"], dtype=np.float64)
        self.intercept_ = float(state["intercept"])
        return self
