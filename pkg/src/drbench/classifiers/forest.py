from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..dataset import rng_stream
from .base import FittedClassifier, check_training_data

LEAF = -1


@dataclass(frozen=True, eq=False)
class DecisionTree:
    """Flat binary tree. Samples with x[feature] <= threshold go left.

    Leaves have feature == -1; `value` is the class-1 fraction of the
    training samples that reached the node. `gain` and `candidates` record
    the Gini gain of each split and the features it was chosen among.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    gain: np.ndarray
    candidates: tuple

    @property
    def node_count(self) -> int:
        return self.feature.size

    def apply(self, X) -> np.ndarray:
        """Leaf index reached by every row of X."""
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = np.flatnonzero(self.feature[node] != LEAF)
        while active.size:
            cur = node[active]
            go_left = X[active, self.feature[cur]] <= self.threshold[cur]
            node[active] = np.where(go_left, self.left[cur], self.right[cur])
            active = active[self.feature[node[active]] != LEAF]
        return node

    def predict_fraction(self, X):
        return self.value[self.apply(X)]

    def vote(self, X):
        return (self.predict_fraction(X) > 0.5).astype(np.int64)


def gini(n1, n):
    p = n1 / n
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def best_split(X, y, rows, features):
    """Best (gain, feature, threshold) over `features` for the samples in `rows`.

    Thresholds are midpoints between consecutive distinct values. Ties keep
    the first feature in `features`, then the lowest threshold. Returns None
    when no feature separates the samples.
    """
    yr = y[rows]
    n = rows.size
    n1 = int(yr.sum())
    parent = gini(n1, n)
    best = None
    for f in features:
        xs = X[rows, f]
        order = np.argsort(xs, kind="stable")
        xs = xs[order]
        cut = np.flatnonzero(xs[1:] > xs[:-1])
        if cut.size == 0:
            continue
        left1 = np.cumsum(yr[order])[cut]
        nl = cut + 1
        nr = n - nl
        right1 = n1 - left1
        gain = parent - (nl * gini(left1, nl) + nr * gini(right1, nr)) / n
        k = int(np.argmax(gain))
        if best is None or gain[k] > best[0]:
            lo, hi = xs[cut[k]], xs[cut[k] + 1]
            thr = 0.5 * (lo + hi)
            if not lo <= thr < hi:
                thr = lo
            best = (float(gain[k]), int(f), float(thr))
    return best


def grow_tree(X, y, rows, max_features=None, rng=None) -> DecisionTree:
    """CART classification tree grown until nodes are pure or hold < 2 samples.

    With `max_features` set, each split considers that many features drawn
    without replacement from `rng`; otherwise all of them.
    """
    d = X.shape[1]
    feature, threshold, left, right, value, gains, cands = [], [], [], [], [], [], []

    def new_node(node_rows):
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(float(y[node_rows].mean()))
        gains.append(0.0)
        cands.append(())
        return len(feature) - 1

    stack = [(new_node(rows), rows)]
    while stack:
        node, node_rows = stack.pop()
        frac = value[node]
        if node_rows.size < 2 or frac == 0.0 or frac == 1.0:
            continue
        if max_features is None or max_features >= d:
            feats = np.arange(d)
        else:
            feats = np.sort(rng.choice(d, size=max_features, replace=False))
        split = best_split(X, y, node_rows, feats)
        if split is None:
            continue
        g, f, thr = split
        mask = X[node_rows, f] <= thr
        lrows, rrows = node_rows[mask], node_rows[~mask]
        feature[node], threshold[node], gains[node] = f, thr, g
        cands[node] = tuple(int(v) for v in feats)
        left[node] = new_node(lrows)
        right[node] = new_node(rrows)
        # right pushed first so the left subtree gets the lower node ids
        stack.append((right[node], rrows))
        stack.append((left[node], lrows))

    return DecisionTree(
        np.array(feature, dtype=np.int64), np.array(threshold), np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64), np.array(value), np.array(gains), tuple(cands))


@dataclass(frozen=True, eq=False)
class ForestModel(FittedClassifier):
    trees: tuple
    seed: int
    n_features_: int

    threshold = 0.5

    @property
    def n_features(self):
        return self.n_features_

    def decision_score(self, X):
        X = self._check(X)
        votes = np.zeros(X.shape[0])
        for tree in self.trees:
            votes += tree.vote(X)
        return votes / len(self.trees)

    def describe(self):
        return {"n_features": self.n_features, "n_trees": len(self.trees),
                "n_nodes": int(sum(t.node_count for t in self.trees))}


def forest_fit(X, y, n_trees: int = 10, seed: int = 0, bootstrap: bool = True,
               max_features="sqrt") -> ForestModel:
    """Bagged CART trees with random feature subsets at each split.

    Tree t draws its bootstrap rows and its split subsets from two separate
    streams keyed by t, so the first m trees of a larger forest are the
    trees of the m-tree forest with the same seed.
    """
    X, y = check_training_data(X, y)
    if n_trees < 1:
        raise ValueError(f"n_trees must be >= 1, got {n_trees}")
    n, d = X.shape
    if max_features == "sqrt":
        max_features = math.ceil(math.sqrt(d))
    trees = []
    for t in range(int(n_trees)):
        if bootstrap:
            rows = rng_stream(seed, f"forest/tree{t}/bootstrap").integers(0, n, size=n)
            rows.sort()
        else:
            rows = np.arange(n)
        sub = rng_stream(seed, f"forest/tree{t}/subspace")
        trees.append(grow_tree(X, y, rows, max_features, sub))
    return ForestModel(tuple(trees), int(seed), d)
