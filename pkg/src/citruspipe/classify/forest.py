"""Random forest of Gini-split CART trees.

Tree ``t`` draws all of its randomness (bootstrap rows, then per-node feature
subsets in depth-first pre-order) from ``PortableRng(seed, FOREST_STREAM + t)``,
so a forest depends only on ``(X, y, params, seed)`` and not on how trees are
scheduled across threads.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidHyperparameter
from ..rng import FOREST_STREAM, PortableRng
from ._common import argmax_lowest, check_queries, check_training_data, positive_int
from .standardize import Standardizer, standardize_fit

LEAF = -1
# relative slack under which two split scores count as tied
_TIE_RTOL = 1e-12


@dataclass(frozen=True)
class DecisionTree:
    """Flat node arrays; node 0 is the root.

    Internal nodes have ``feature >= 0`` and route ``x[feature] <= threshold``
    to ``left``. Leaves have ``feature == -1`` and carry ``value``.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def apply(self, Q: np.ndarray) -> np.ndarray:
        node = np.zeros(Q.shape[0], dtype=np.int64)
        active = self.feature[node] != LEAF
        while np.any(active):
            rows = np.flatnonzero(active)
            n = node[rows]
            go_left = Q[rows, self.feature[n]] <= self.threshold[n]
            node[rows] = np.where(go_left, self.left[n], self.right[n])
            active[rows] = self.feature[node[rows]] != LEAF
        return node

    def predict(self, Q: np.ndarray) -> np.ndarray:
        return self.value[self.apply(Q)]


@dataclass(frozen=True)
class RandomForestModel:
    trees: tuple[DecisionTree, ...]
    n_classes: int
    n_features: int
    max_features: int
    min_samples_split: int
    seed: int
    standardizer: Standardizer | None = None

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    @property
    def dim(self) -> int:
        return self.n_features

    def predict(self, Q) -> np.ndarray:
        return rf_predict(self, Q)


def _majority(counts: np.ndarray) -> int:
    return int(np.argmax(counts))


def _best_split(sub: np.ndarray, yn: np.ndarray, feats: np.ndarray, n_classes: int):
    """Best ``(feature, threshold)`` given the node's rows restricted to
    candidate columns ``feats`` (ascending), or None when nothing separates.

    Maximizes ``sum(L^2)/n_L + sum(R^2)/n_R`` over class-count vectors, which
    is equivalent to maximizing the Gini impurity decrease. Near-equal scores
    go to the lower feature index, then the lower threshold.
    """
    n = len(yn)
    order = np.argsort(sub, axis=0, kind="stable")
    vals = np.take_along_axis(sub, order, axis=0)
    onehot = np.eye(n_classes)[yn]
    left = np.cumsum(onehot[order], axis=0)[:-1]  # (n-1) x F x K
    total = onehot.sum(axis=0)
    right = total - left
    n_left = np.arange(1, n, dtype=np.float64)[:, None]
    n_right = n - n_left
    score = (left**2).sum(axis=2) / n_left + (right**2).sum(axis=2) / n_right
    valid = vals[:-1] < vals[1:]
    if not valid.any():
        return None
    score = np.where(valid, score, -np.inf)
    best = score.max()
    pos, col = np.nonzero(score >= best - _TIE_RTOL * abs(best))

    lo = vals[pos, col]
    hi = vals[pos + 1, col]
    mid = (lo + hi) / 2.0
    thr = np.where(mid < hi, mid, lo)
    feat = feats[col]
    pick = np.lexsort((thr, feat))[0]
    return int(feat[pick]), float(thr[pick])


def _grow_tree(X: np.ndarray, y: np.ndarray, n_classes: int, max_features: int, min_samples_split: int, rng: PortableRng) -> DecisionTree:
    n, d = X.shape
    rows = rng.integers(n, n)
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node() -> int:
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(LEAF)
        return len(feature) - 1

    root = new_node()
    stack = [(root, rows)]
    while stack:
        node, idx = stack.pop()
        yn = y[idx]
        counts = np.bincount(yn, minlength=n_classes)
        split = None
        if np.count_nonzero(counts) > 1 and len(idx) >= min_samples_split:
            feats = np.sort(rng.sample_without_replacement(d, max_features))
            split = _best_split(X[np.ix_(idx, feats)], yn, feats, n_classes)
        if split is None:
            value[node] = _majority(counts)
            continue
        f, t = split
        go_left = X[idx, f] <= t
        l_node, r_node = new_node(), new_node()
        feature[node], threshold[node], left[node], right[node] = f, t, l_node, r_node
        # right pushed first so the left subtree is grown (and numbered) first
        stack.append((r_node, idx[~go_left]))
        stack.append((l_node, idx[go_left]))

    return DecisionTree(
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(value, dtype=np.int64),
    )


def rf_fit(
    X,
    y,
    n_trees: int = 100,
    max_features: int | None = None,
    min_samples_split: int = 2,
    seed: int = 0,
    n_classes: int | None = None,
    standardize: bool = False,
    n_jobs: int = 1,
) -> RandomForestModel:
    X, y, n_classes = check_training_data(X, y, n_classes)
    d = X.shape[1]
    n_trees = positive_int("n_trees", n_trees)
    if max_features is None:
        max_features = max(1, math.isqrt(d))
    max_features = positive_int("max_features", max_features)
    if max_features > d:
        raise InvalidHyperparameter(f"max_features={max_features} exceeds the {d} features")
    min_samples_split = positive_int("min_samples_split", min_samples_split)
    if min_samples_split < 2:
        raise InvalidHyperparameter("min_samples_split must be >= 2")
    if not (isinstance(seed, (int, np.integer)) and 0 <= seed < 1 << 64):
        raise InvalidHyperparameter(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    scaler = None
    if standardize:
        scaler = standardize_fit(X)
        X = scaler.apply(X)

    def build(t: int) -> DecisionTree:
        return _grow_tree(X, y, n_classes, max_features, min_samples_split, PortableRng(int(seed), FOREST_STREAM + t))

    if n_jobs > 1:
        with ThreadPoolExecutor(n_jobs) as pool:
            trees = tuple(pool.map(build, range(n_trees)))
    else:
        trees = tuple(build(t) for t in range(n_trees))
    return RandomForestModel(trees, n_classes, d, max_features, min_samples_split, int(seed), scaler)


def rf_tree_votes(model: RandomForestModel, Q) -> np.ndarray:
    """Per-tree predictions, shape ``n_trees x M``."""
    Q = check_queries(Q, model.dim)
    if model.standardizer is not None:
        Q = model.standardizer.apply(Q)
    return np.stack([tree.predict(Q) for tree in model.trees])


def rf_predict(model: RandomForestModel, Q) -> np.ndarray:
    votes = rf_tree_votes(model, Q)
    counts = np.zeros((votes.shape[1], model.n_classes), dtype=np.int64)
    for tree_votes in votes:
        counts[np.arange(votes.shape[1]), tree_votes] += 1
    return argmax_lowest(counts)
