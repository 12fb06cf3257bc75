from __future__ import annotations

import numpy as np

from .tree import TreeArrays, build_tree


def majority_vote(votes) -> np.ndarray:
    """Column-wise hard vote over an (n_trees, n_samples) 0/1 array; ties -> 0."""
    votes = np.asarray(votes)
    return (2 * votes.sum(axis=0) > votes.shape[0]).astype(np.int64)


class RandomForest:
    """Bagged CART trees with random feature subsets and a hard majority vote.

    Tree ``t`` draws its bootstrap sample and per-node feature subsets from
    ``default_rng([random_state, t])``, so trees are reproducible and
    independent of the order in which they are built.
    """

    stochastic = True

    def __init__(self, n_estimators=100, max_depth=None, max_features="sqrt", random_state=0):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.max_features = max_features
        self.random_state = random_state
        self.trees_: list[TreeArrays] = []

    def _n_candidates(self, d):
        if self.max_features == "sqrt":
            return max(1, int(np.sqrt(d)))
        if self.max_features is None:
            return d
        return int(self.max_features)

    def fit(self, x, y):
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        n, d = x.shape
        k = self._n_candidates(d)
        self.trees_ = []
        for t in range(self.n_estimators):
            rng = np.random.default_rng([self.random_state, t])
            counts = np.bincount(rng.integers(0, n, size=n), minlength=n).astype(np.float64)
            rows = np.flatnonzero(counts)
            self.trees_.append(build_tree(x, y, counts, max_depth=self.max_depth,
                                          max_features=k, rng=rng, rows=rows))
        self.n_features_ = d
        return self

    def votes(self, x) -> np.ndarray:
        return np.stack([t.predict(x) for t in self.trees_])

    def predict_proba(self, x):
        return self.votes(x).mean(axis=0)

    def predict(self, x):
        return majority_vote(self.votes(x))

    def get_params(self):
        return {"n_estimators": self.n_estimators, "max_depth": self.max_depth,
                "max_features": self.max_features, "random_state": self.random_state}

    def get_state(self):
        return {"n_features": self.n_features_,
                "trees": [t.to_dict() for t in self.trees_]}

    def set_state(self, state):
        self.n_features_ = int(state["n_features"])
        self.trees_ = [TreeArrays.from_dict(t) for t in state["trees"]]
        return self
