"""CART-style binary decision tree with Gini impurity.

Nodes are stored in flat arrays, root first, children always after their
parent. A leaf has ``feature == -1`` and stores the fraction of squiggly
training rows that reached it. Rows go left iff ``x[feature] < threshold``.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .base import Dataset, Model, check_dim, require_rows

LEAF = -1
_TIE = 1e-12


class DecisionTree(Model):
    kind = "tree"
    threshold = 0.5

    def __init__(self, feature, threshold, left, right, value, dim: int):
        self.feature = [int(f) for f in feature]
        self.split = [float(t) for t in threshold]
        self.left = [int(i) for i in left]
        self.right = [int(i) for i in right]
        self.value = [float(v) for v in value]
        self.dim = int(dim)

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def depth(self) -> int:
        best = 0
        stack = [(0, 0)]
        while stack:
            node, d = stack.pop()
            best = max(best, d)
            if self.feature[node] != LEAF:
                stack.append((self.left[node], d + 1))
                stack.append((self.right[node], d + 1))
        return best

    def leaf_for(self, x) -> int:
        x = check_dim(x, self.dim)
        node = 0
        while self.feature[node] != LEAF:
            node = self.left[node] if x[self.feature[node]] < self.split[node] else self.right[node]
        return node

    def score(self, x) -> float:
        return self.value[self.leaf_for(x)]


def _best_split(X: np.ndarray, y: np.ndarray, min_leaf: int) -> Optional[tuple[int, float]]:
    """Lowest weighted Gini over all features and midpoint thresholds.

    Ties go to the lower feature index, then the lower threshold.
    """
    n = len(y)
    best: Optional[tuple[float, int, float]] = None
    for j in range(X.shape[1]):
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        ys = y[order]
        cut = np.nonzero(xs[1:] > xs[:-1])[0] + 1  # rows left of each cut
        if len(cut) == 0:
            continue
        cut = cut[(cut >= min_leaf) & (n - cut >= min_leaf)]
        if len(cut) == 0:
            continue
        pos_left = np.cumsum(ys)[cut - 1].astype(float)
        n_left = cut.astype(float)
        n_right = n - n_left
        pos_right = float(ys.sum()) - pos_left
        gini = (2 * pos_left * (n_left - pos_left) / n_left
                + 2 * pos_right * (n_right - pos_right) / n_right) / n
        k = int(np.argmax(gini <= gini.min() + _TIE))  # lowest threshold among ties
        if best is None or gini[k] < best[0] - _TIE:
            lo, hi = xs[cut[k] - 1], xs[cut[k]]
            mid = 0.5 * (lo + hi)
            if not lo < mid:
                mid = hi
            best = (float(gini[k]), j, float(mid))
    return None if best is None else (best[1], best[2])


def tree_train(data: Dataset, max_depth: Optional[int] = None, min_leaf: int = 1) -> DecisionTree:
    """Grow a tree until nodes are pure, ``max_depth`` is hit, or no split
    leaves ``min_leaf`` rows on both sides.

    A split is taken even when it does not lower impurity (e.g. XOR-like
    data), so an unlimited tree fits any collision-free training set.
    """
    require_rows(data)
    if min_leaf < 1:
        raise ValueError("min_leaf must be >= 1")
    X, y = data.X, data.y
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []

    def new_node(rows: np.ndarray) -> int:
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(float(y[rows].mean()))
        return len(feature) - 1

    root = new_node(np.arange(len(y)))
    stack = [(root, np.arange(len(y)), 0)]
    while stack:
        node, rows, depth = stack.pop()
        pure = value[node] in (0.0, 1.0)
        if pure or (max_depth is not None and depth >= max_depth) or len(rows) < 2 * min_leaf:
            continue
        split = _best_split(X[rows], y[rows], min_leaf)
        if split is None:
            continue
        j, thr = split
        go_left = X[rows, j] < thr
        feature[node] = j
        threshold[node] = thr
        left[node] = new_node(rows[go_left])
        right[node] = new_node(rows[~go_left])
        # right pushed first so the left subtree is expanded first
        stack.append((right[node], rows[~go_left], depth + 1))
        stack.append((left[node], rows[go_left], depth + 1))
    return DecisionTree(feature, threshold, left, right, value, data.dim)
