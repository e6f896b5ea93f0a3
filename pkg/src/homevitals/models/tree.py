"""CART decision trees built from scratch: Gini splits for classification,
variance-reduction splits for regression, mean-payload leaves.

Split search is vectorized: per candidate feature the node's values are
sorted once and every boundary between distinct values is scored from prefix
sums, so training stays fast enough for hundred-tree forests and boosting.
"""

from __future__ import annotations

import numpy as np

from ..errors import DegenerateTraining, InputError

_LEAF = -1


def _validate_xy(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2:
        raise InputError(f"X must be 2-D, got shape {X.shape}")
    if y.shape != (X.shape[0],):
        raise InputError(f"y length {y.shape} does not match {X.shape[0]} rows")
    if X.size and not np.all(np.isfinite(X)):
        raise InputError("X contains NaN or Inf")
    return X, y


class _TreeBase:
    """Shared structure: flat node arrays plus a vectorized row router."""

    def __init__(self, max_depth=None, min_samples_leaf=1, features_per_split=None, seed=0):
        self.max_depth = max_depth
        self.min_samples_leaf = int(min_samples_leaf)
        self.features_per_split = features_per_split
        self.seed = seed
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.n_features_: int | None = None
        self.feature_importances_: np.ndarray | None = None

    def _new_node(self) -> int:
        self.feature.append(_LEAF)
        self.threshold.append(0.0)
        self.left.append(_LEAF)
        self.right.append(_LEAF)
        return len(self.feature) - 1

    def _candidate_features(self, rng: np.random.Generator, d: int) -> np.ndarray:
        k = self.features_per_split
        if k is None or k >= d:
            return np.arange(d)
        return rng.choice(d, size=k, replace=False)

    def _leaf_ids(self, X: np.ndarray) -> np.ndarray:
        """Leaf node id for every row, routed level by level."""
        n = X.shape[0]
        node_of = np.zeros(n, dtype=np.int64)
        active = np.arange(n)
        while active.size:
            nodes = node_of[active]
            feats = np.asarray(self.feature)[nodes]
            internal = feats != _LEAF
            active = active[internal]
            if not active.size:
                break
            nodes = nodes[internal]
            feats = feats[internal]
            thresh = np.asarray(self.threshold)[nodes]
            go_left = X[active, feats] < thresh
            node_of[active] = np.where(
                go_left, np.asarray(self.left)[nodes], np.asarray(self.right)[nodes]
            )
        return node_of

    def _split_structure(self) -> dict:
        return {
            "feature": [int(f) for f in self.feature],
            "threshold": [float(t) for t in self.threshold],
            "left": [int(v) for v in self.left],
            "right": [int(v) for v in self.right],
        }

    def _load_structure(self, doc: dict) -> None:
        self.feature = [int(f) for f in doc["feature"]]
        self.threshold = [float(t) for t in doc["threshold"]]
        self.left = [int(v) for v in doc["left"]]
        self.right = [int(v) for v in doc["right"]]


def _best_split_classification(x, onehot, min_leaf):
    """Return (cost, threshold) for the best boundary of one sorted feature."""
    order = np.argsort(x, kind="stable")
    xs = x[order]
    n = x.size
    counts_left = np.cumsum(onehot[order], axis=0)[:-1]  # split after position i
    n_left = np.arange(1, n, dtype=np.float64)
    n_right = n - n_left
    counts_right = counts_left[-1] + onehot[order][-1] - counts_left
    gini_left = 1.0 - np.sum((counts_left / n_left[:, None]) ** 2, axis=1)
    gini_right = 1.0 - np.sum((counts_right / n_right[:, None]) ** 2, axis=1)
    cost = (n_left * gini_left + n_right * gini_right) / n
    valid = (xs[:-1] < xs[1:]) & (n_left >= min_leaf) & (n_right >= min_leaf)
    if not valid.any():
        return None
    cost = np.where(valid, cost, np.inf)
    i = int(np.argmin(cost))
    return float(cost[i]), float((xs[i] + xs[i + 1]) / 2.0)


def _best_split_regression(x, y, min_leaf):
    order = np.argsort(x, kind="stable")
    xs = x[order]
    ys = y[order]
    n = x.size
    s = np.cumsum(ys)[:-1]
    s2 = np.cumsum(ys**2)[:-1]
    n_left = np.arange(1, n, dtype=np.float64)
    n_right = n - n_left
    total, total2 = ys.sum(), (ys**2).sum()
    sse_left = s2 - s**2 / n_left
    sse_right = (total2 - s2) - (total - s) ** 2 / n_right
    cost = (sse_left + sse_right) / n
    valid = (xs[:-1] < xs[1:]) & (n_left >= min_leaf) & (n_right >= min_leaf)
    if not valid.any():
        return None
    cost = np.where(valid, cost, np.inf)
    i = int(np.argmin(cost))
    return float(cost[i]), float((xs[i] + xs[i + 1]) / 2.0)


class DecisionTreeClassifier(_TreeBase):
    """Binary-or-multiclass CART with Gini splits and class-count leaves."""

    def __init__(self, max_depth=None, min_samples_leaf=1, features_per_split=None, seed=0):
        super().__init__(max_depth, min_samples_leaf, features_per_split, seed)
        self.classes_: np.ndarray | None = None
        self.leaf_counts: list[np.ndarray | None] = []

    def fit(self, X, y) -> "DecisionTreeClassifier":
        X, y = _validate_xy(X, y)
        if X.shape[0] == 0:
            raise DegenerateTraining("empty training set")
        self.classes_ = np.unique(y)
        y_enc = np.searchsorted(self.classes_, y)
        n, d = X.shape
        self.n_features_ = d
        k = len(self.classes_)
        onehot = np.zeros((n, k))
        onehot[np.arange(n), y_enc] = 1.0
        rng = np.random.default_rng(self.seed)
        importances = np.zeros(d)

        self.feature, self.threshold, self.left, self.right = [], [], [], []
        self.leaf_counts = []
        root = self._new_node()
        self.leaf_counts.append(None)
        stack = [(root, np.arange(n), 0)]
        while stack:
            node, idx, depth = stack.pop()
            counts = onehot[idx].sum(axis=0)
            gini = 1.0 - np.sum((counts / idx.size) ** 2)
            stop = (
                gini == 0.0
                or idx.size < 2 * self.min_samples_leaf
                or (self.max_depth is not None and depth >= self.max_depth)
            )
            best = None
            if not stop:
                for f in self._candidate_features(rng, d):
                    found = _best_split_classification(
                        X[idx, f], onehot[idx], self.min_samples_leaf
                    )
                    if found and (best is None or found[0] < best[0]):
                        best = (found[0], int(f), found[1])
            if best is None:
                self.leaf_counts[node] = counts
                continue
            cost, f, thr = best
            # cost is already the weighted child Gini; decrease is gini - cost.
            importances[f] += (idx.size / n) * (gini - cost)
            go_left = X[idx, f] < thr
            self.feature[node] = f
            self.threshold[node] = thr
            left_id = self._new_node()
            self.leaf_counts.append(None)
            right_id = self._new_node()
            self.leaf_counts.append(None)
            self.left[node] = left_id
            self.right[node] = right_id
            stack.append((left_id, idx[go_left], depth + 1))
            stack.append((right_id, idx[~go_left], depth + 1))

        total = importances.sum()
        self.feature_importances_ = importances / total if total > 0 else importances
        return self

    def predict_proba(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        leaf = self._leaf_ids(X)
        out = np.empty((X.shape[0], len(self.classes_)))
        for i, node in enumerate(leaf):
            counts = self.leaf_counts[node]
            out[i] = counts / counts.sum()
        return out

    def predict(self, X) -> np.ndarray:
        proba = self.predict_proba(X)
        # Ties break to the first (lowest) class.
        return self.classes_[np.argmax(proba, axis=1)]

    def to_dict(self) -> dict:
        doc = self._split_structure()
        doc["classes"] = [float(c) for c in self.classes_]
        doc["leaf_counts"] = [
            None if c is None else [float(v) for v in c] for c in self.leaf_counts
        ]
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "DecisionTreeClassifier":
        tree = cls()
        tree._load_structure(doc)
        tree.classes_ = np.asarray(doc["classes"])
        tree.leaf_counts = [
            None if c is None else np.asarray(c, dtype=np.float64)
            for c in doc["leaf_counts"]
        ]
        return tree


class DecisionTreeRegressor(_TreeBase):
    """CART regressor: splits minimize within-child variance, leaves predict means."""

    def __init__(self, max_depth=None, min_samples_leaf=1, features_per_split=None, seed=0):
        super().__init__(max_depth, min_samples_leaf, features_per_split, seed)
        self.leaf_values: list[float | None] = []

    def fit(self, X, y) -> "DecisionTreeRegressor":
        X, y = _validate_xy(X, y)
        y = y.astype(np.float64)
        n, d = X.shape
        if n == 0:
            raise DegenerateTraining("empty training set")
        if n < self.min_samples_leaf:
            raise DegenerateTraining(
                f"{n} rows cannot satisfy min_samples_leaf={self.min_samples_leaf}"
            )
        self.n_features_ = d
        rng = np.random.default_rng(self.seed)
        importances = np.zeros(d)

        self.feature, self.threshold, self.left, self.right = [], [], [], []
        self.leaf_values = []
        root = self._new_node()
        self.leaf_values.append(None)
        stack = [(root, np.arange(n), 0)]
        while stack:
            node, idx, depth = stack.pop()
            target = y[idx]
            variance = float(target.var())
            stop = (
                variance == 0.0
                or idx.size < 2 * self.min_samples_leaf
                or (self.max_depth is not None and depth >= self.max_depth)
            )
            best = None
            if not stop:
                for f in self._candidate_features(rng, d):
                    found = _best_split_regression(X[idx, f], target, self.min_samples_leaf)
                    if found and (best is None or found[0] < best[0]):
                        best = (found[0], int(f), found[1])
            if best is None:
                self.leaf_values[node] = float(target.mean())
                continue
            cost, f, thr = best
            importances[f] += (idx.size / n) * (variance - cost)
            go_left = X[idx, f] < thr
            self.feature[node] = f
            self.threshold[node] = thr
            left_id = self._new_node()
            self.leaf_values.append(None)
            right_id = self._new_node()
            self.leaf_values.append(None)
            self.left[node] = left_id
            self.right[node] = right_id
            stack.append((left_id, idx[go_left], depth + 1))
            stack.append((right_id, idx[~go_left], depth + 1))

        total = importances.sum()
        self.feature_importances_ = importances / total if total > 0 else importances
        return self

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        leaf = self._leaf_ids(X)
        values = np.asarray(
            [0.0 if v is None else v for v in self.leaf_values], dtype=np.float64
        )
        return values[leaf]

    def to_dict(self) -> dict:
        doc = self._split_structure()
        doc["leaf_values"] = [None if v is None else float(v) for v in self.leaf_values]
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "DecisionTreeRegressor":
        tree = cls()
        tree._load_structure(doc)
        tree.leaf_values = [None if v is None else float(v) for v in doc["leaf_values"]]
        return tree
