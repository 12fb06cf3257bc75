"""CART decision trees (Gini impurity) stored as flat arrays.

Labels are 0 (Low) and 1 (High). Thresholds are midpoints between
consecutive distinct feature values; a sample goes left when
``x[feature] <= threshold``. Among equally good splits the lowest feature
index wins, then the lowest threshold.
"""

from __future__ import annotations

import numpy as np

LEAF = -1
_TIE_TOL = 1e-12


def _split_scores(xs, ys, ws):
    """Weighted child impurity (up to a constant factor) for every cut.

    `xs`, `ys`, `ws` are n x k arrays of values, labels and weights, each
    column sorted by value. Entry ``[i, j]`` scores cutting column j between
    sorted positions i and i+1; invalid cuts (equal neighbours) are +inf.
    """
    w1s = ws * ys
    wl = np.cumsum(ws, axis=0)[:-1]
    l1 = np.cumsum(w1s, axis=0)[:-1]
    total = ws[:, :1].sum()
    total1 = w1s[:, :1].sum()
    wr = total - wl
    r1 = total1 - l1
    l0 = wl - l1
    r0 = wr - r1
    with np.errstate(divide="ignore", invalid="ignore"):
        score = np.where(wl > 0, l1 * l0 / wl, 0.0) + np.where(wr > 0, r1 * r0 / wr, 0.0)
    valid = xs[1:] > xs[:-1]
    return np.where(valid, score, np.inf)


def best_split_sorted(xs, ys, ws, features):
    """Pick the best cut from presorted columns.

    Returns ``(feature, threshold, score)`` or None when no column has two
    distinct values. `features` must be in ascending order so that ties
    resolve to the lowest feature index.
    """
    if xs.shape[0] < 2:
        return None
    score = _split_scores(xs, ys, ws)
    best = score.min()
    if not np.isfinite(best):
        return None
    tol = _TIE_TOL * max(1.0, abs(best))
    # column-major scan: lowest feature first, then lowest threshold
    flat = np.flatnonzero((score <= best + tol).T.ravel())[0]
    j, i = divmod(int(flat), score.shape[0])
    lo, hi = xs[i, j], xs[i + 1, j]
    thr = (lo + hi) / 2.0
    if thr >= hi:  # midpoint rounded up onto the right value
        thr = lo
    return int(features[j]), float(thr), float(score[i, j])


def _node_split(sub, y, w, rows, features):
    order = np.argsort(sub, axis=0, kind="stable")
    xs = np.take_along_axis(sub, order, axis=0)
    ys = y[rows][order]
    ws = w[rows][order]
    return best_split_sorted(xs, ys, ws, features)


class _Builder:
    def __init__(self, x, y, w, max_depth, max_features, rng):
        self.x, self.y, self.w = x, y, w
        self.max_depth = max_depth
        self.max_features = max_features
        self.rng = rng
        self.feature, self.threshold = [], []
        self.left, self.right = [], []
        self.value, self.n_node = [], []

    def _new_node(self, rows):
        wt = self.w[rows]
        total = wt.sum()
        self.feature.append(LEAF)
        self.threshold.append(0.0)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(float((wt * self.y[rows]).sum() / total) if total > 0 else 0.0)
        self.n_node.append(len(rows))
        return len(self.feature) - 1

    def _candidates(self, rows):
        """Ascending candidate features and the node's values for them."""
        d = self.x.shape[1]
        if self.max_features is None or self.max_features >= d:
            feats = np.arange(d)
            return feats, self.x[rows]
        # draw features until max_features non-constant ones are found
        perm = self.rng.permutation(d)
        chosen, blocks, pos = [], [], 0
        while len(chosen) < self.max_features and pos < d:
            take = perm[pos:pos + self.max_features - len(chosen)]
            pos += len(take)
            block = self.x[np.ix_(rows, take)]
            ok = block.max(axis=0) > block.min(axis=0)
            chosen.extend(take[ok])
            blocks.append(block[:, ok])
        feats = np.asarray(chosen, dtype=np.intp)
        order = np.argsort(feats)
        return feats[order], np.concatenate(blocks, axis=1)[:, order]

    def build(self, rows):
        root = self._new_node(rows)
        stack = [(root, rows, 0)]
        while stack:
            node, rows, depth = stack.pop()
            v = self.value[node]
            if len(rows) < 2 or v <= 0.0 or v >= 1.0:
                continue
            if self.max_depth is not None and depth >= self.max_depth:
                continue
            feats, block = self._candidates(rows)
            if len(feats) == 0:
                continue
            split = _node_split(block, self.y, self.w, rows, feats)
            if split is None:
                continue
            f, thr, _ = split
            go_left = self.x[rows, f] <= thr
            lrows, rrows = rows[go_left], rows[~go_left]
            left = self._new_node(lrows)
            right = self._new_node(rrows)
            self.feature[node], self.threshold[node] = f, thr
            self.left[node], self.right[node] = left, right
            # right pushed first so the left subtree is numbered first
            stack.append((right, rrows, depth + 1))
            stack.append((left, lrows, depth + 1))
        return TreeArrays(
            np.asarray(self.feature, dtype=np.intp),
            np.asarray(self.threshold, dtype=np.float64),
            np.asarray(self.left, dtype=np.intp),
            np.asarray(self.right, dtype=np.intp),
            np.asarray(self.value, dtype=np.float64),
            np.asarray(self.n_node, dtype=np.intp),
        )


class TreeArrays:
    """Fitted tree structure. Node 0 is the root; leaves have feature == -1."""

    def __init__(self, feature, threshold, left, right, value, n_node=None):
        self.feature = np.asarray(feature, dtype=np.intp)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.intp)
        self.right = np.asarray(right, dtype=np.intp)
        self.value = np.asarray(value, dtype=np.float64)
        self.n_node = np.zeros_like(self.feature) if n_node is None else np.asarray(n_node, dtype=np.intp)

    def apply(self, x) -> np.ndarray:
        """Leaf index reached by each row of `x`."""
        x = np.asarray(x, dtype=np.float64)
        node = np.zeros(x.shape[0], dtype=np.intp)
        rows = np.arange(x.shape[0])
        while True:
            feat = self.feature[node]
            inner = feat != LEAF
            if not inner.any():
                return node
            r, n, f = rows[inner], node[inner], feat[inner]
            node[inner] = np.where(x[r, f] <= self.threshold[n], self.left[n], self.right[n])

    def predict(self, x) -> np.ndarray:
        # tie (value exactly 0.5) goes to Low
        return (self.value[self.apply(x)] > 0.5).astype(np.int64)

    def depth(self) -> int:
        """Number of splits on the longest root-to-leaf path."""
        best, stack = 0, [(0, 0)]
        while stack:
            node, d = stack.pop()
            if self.feature[node] == LEAF:
                best = max(best, d)
            else:
                stack.append((self.left[node], d + 1))
                stack.append((self.right[node], d + 1))
        return best

    @property
    def node_count(self) -> int:
        return len(self.feature)

    def to_dict(self) -> dict:
        return {"feature": self.feature, "threshold": self.threshold, "left": self.left,
                "right": self.right, "value": self.value, "n_node": self.n_node}

    @classmethod
    def from_dict(cls, d):
        return cls(d["feature"], d["threshold"], d["left"], d["right"], d["value"], d.get("n_node"))


def build_tree(x, y, sample_weight=None, max_depth=None, max_features=None, rng=None, rows=None):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, dtype=np.float64)
    rows = np.arange(len(y)) if rows is None else np.asarray(rows, dtype=np.intp)
    return _Builder(x, y, w, max_depth, max_features, rng).build(rows)


class DecisionTree:
    """Greedy CART classifier with a depth limit (default 5)."""

    stochastic = False

    def __init__(self, max_depth=5):
        self.max_depth = max_depth
        self.tree_ = None

    def fit(self, x, y, sample_weight=None):
        self.tree_ = build_tree(x, y, sample_weight, max_depth=self.max_depth)
        self.n_features_ = np.asarray(x).shape[1]
        return self

    def predict_proba(self, x):
        return self.tree_.value[self.tree_.apply(x)]

    def predict(self, x):
        return self.tree_.predict(x)

    def get_params(self):
        return {"max_depth": self.max_depth}

    def get_state(self):
        return {"n_features": self.n_features_, "tree": self.tree_.to_dict()}

    def set_state(self, state):
        self.n_features_ = int(state["n_features"])
        self.tree_ = TreeArrays.from_dict(state["tree"])
        return self
