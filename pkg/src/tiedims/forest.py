"""Random forest of Gini-split decision trees, built from scratch.

Binary classification only. Each tree trains on a bootstrap resample of
size n and considers ceil(sqrt(F)) randomly chosen features per split.
Tree randomness derives from (seed, tree index), so training is
reproducible regardless of evaluation order and trees could be built in
parallel without changing the model.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ForestParams:
    """Training hyperparameters. Defaults follow common forest practice."""

    n_trees: int = 100
    max_depth: int | None = None
    min_leaf: int = 1
    features_per_split: int | None = None  # None -> ceil(sqrt(n_features))

    def resolved_features_per_split(self, n_features: int) -> int:
        if self.features_per_split is not None:
            return min(self.features_per_split, n_features)
        return min(int(math.ceil(math.sqrt(n_features))), n_features)


@dataclass
class _Tree:
    """Flat-array decision tree: node i splits on feature[i] <= threshold[i]."""

    feature: np.ndarray  # int32, -1 marks a leaf
    threshold: np.ndarray  # float64
    left: np.ndarray  # int32 child indices
    right: np.ndarray
    vote: np.ndarray  # int8 class voted at a leaf

    def predict(self, x: np.ndarray) -> np.ndarray:
        node = np.zeros(x.shape[0], dtype=np.int32)
        active = self.feature[node] >= 0
        while active.any():
            idx = np.flatnonzero(active)
            at = node[idx]
            go_left = x[idx, self.feature[at]] <= self.threshold[at]
            node[idx] = np.where(go_left, self.left[at], self.right[at])
            active = self.feature[node] >= 0
        return self.vote[node]


@dataclass
class ForestModel:
    """A trained forest plus everything needed to reproduce it."""

    trees: list[_Tree]
    params: ForestParams
    seed: int
    n_features: int
    importance_raw: np.ndarray = field(default_factory=lambda: np.zeros(0))
    constant_class: int | None = None  # set for degenerate single-class models


def _gini(pos: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Gini impurity of groups with ``pos`` positives out of ``n``."""
    p = pos / n
    return 1.0 - p**2 - (1.0 - p) ** 2


class _TreeBuilder:
    def __init__(self, x: np.ndarray, y: np.ndarray, params: ForestParams,
                 rng: np.random.Generator):
        self.x = x
        self.y = y
        self.params = params
        self.rng = rng
        self.m = params.resolved_features_per_split(x.shape[1])
        self.n_root = x.shape[0]
        self.importance = np.zeros(x.shape[1])
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.vote: list[int] = []

    def build(self) -> _Tree:
        root_idx = np.arange(self.n_root)
        stack = [(root_idx, 0, -1, False)]  # indices, depth, parent slot, is_right
        while stack:
            idx, depth, parent, is_right = stack.pop()
            node_id = len(self.feature)
            if parent >= 0:
                if is_right:
                    self.right[parent] = node_id
                else:
                    self.left[parent] = node_id
            split = self._find_split(idx, depth)
            if split is None:
                pos = int(self.y[idx].sum())
                self.feature.append(-1)
                self.threshold.append(0.0)
                self.left.append(-1)
                self.right.append(-1)
                self.vote.append(1 if 2 * pos > idx.size else 0)
                continue
            feat, thr, gain, mask = split
            self.importance[feat] += gain * (idx.size / self.n_root)
            self.feature.append(feat)
            self.threshold.append(thr)
            self.left.append(-1)
            self.right.append(-1)
            self.vote.append(0)
            stack.append((idx[~mask], depth + 1, node_id, True))
            stack.append((idx[mask], depth + 1, node_id, False))
        return _Tree(
            feature=np.asarray(self.feature, dtype=np.int32),
            threshold=np.asarray(self.threshold, dtype=np.float64),
            left=np.asarray(self.left, dtype=np.int32),
            right=np.asarray(self.right, dtype=np.int32),
            vote=np.asarray(self.vote, dtype=np.int8),
        )

    def _find_split(self, idx: np.ndarray, depth: int):
        """Best Gini split among m random features, or None to make a leaf."""
        n = idx.size
        min_leaf = self.params.min_leaf
        if n < 2 * min_leaf or n < 2:
            return None
        if self.params.max_depth is not None and depth >= self.params.max_depth:
            return None
        y_node = self.y[idx]
        pos = int(y_node.sum())
        if pos == 0 or pos == n:
            return None  # pure
        parent_gini = 1.0 - (pos / n) ** 2 - ((n - pos) / n) ** 2
        feats = self.rng.choice(self.x.shape[1], size=self.m, replace=False)
        best = None  # (score, feat, thr, order, split_pos)
        for feat in feats:
            col = self.x[idx, feat]
            order = np.argsort(col, kind="stable")
            xs = col[order]
            if xs[0] == xs[-1]:
                continue
            ys = y_node[order]
            cum_pos = np.cumsum(ys)
            n_left = np.arange(1, n)
            n_right = n - n_left
            valid = xs[1:] > xs[:-1]
            if min_leaf > 1:
                valid &= (n_left >= min_leaf) & (n_right >= min_leaf)
            if not valid.any():
                continue
            pos_left = cum_pos[:-1]
            pos_right = pos - pos_left
            score = (n_left * _gini(pos_left, n_left) + n_right * _gini(pos_right, n_right)) / n
            score[~valid] = np.inf
            i = int(np.argmin(score))
            if best is None or score[i] < best[0]:
                thr = float(0.5 * (xs[i] + xs[i + 1]))
                best = (float(score[i]), int(feat), thr, order, i)
        if best is None:
            return None
        score, feat, thr, order, i = best
        gain = parent_gini - score
        mask = np.zeros(n, dtype=bool)
        mask[order[: i + 1]] = True
        return feat, thr, gain, mask


def train_forest(
    x: np.ndarray, y: np.ndarray, params: ForestParams = ForestParams(), *, seed: int
) -> ForestModel:
    """Train a forest on feature matrix ``x`` and 0/1 labels ``y``.

    Single-class data yields a degenerate constant model with a warning;
    empty data is an error.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y)
    if x.ndim != 2:
        raise DataError("feature matrix must be 2-D")
    if x.shape[0] != y.shape[0]:
        raise DataError("feature matrix and labels disagree on sample count")
    if x.shape[0] == 0:
        raise DataError("cannot train on empty data")
    classes = np.unique(y)
    if not np.isin(classes, (0, 1)).all():
        raise DataError("labels must be 0 (negative) or 1 (positive)")
    if classes.size == 1:
        logger.warning("training data has a single class (%d); model is constant", classes[0])
        return ForestModel(
            trees=[], params=params, seed=seed, n_features=x.shape[1],
            importance_raw=np.zeros(x.shape[1]), constant_class=int(classes[0]),
        )

    n = x.shape[0]
    trees: list[_Tree] = []
    importance = np.zeros(x.shape[1])
    y01 = (y == 1).astype(np.int8)
    for t in range(params.n_trees):
        rng = np.random.default_rng([seed, t])
        boot = rng.integers(0, n, size=n)
        builder = _TreeBuilder(x[boot], y01[boot], params, rng)
        trees.append(builder.build())
        importance += builder.importance
    importance /= params.n_trees
    return ForestModel(
        trees=trees, params=params, seed=seed, n_features=x.shape[1],
        importance_raw=importance,
    )


def predict_forest(model: ForestModel, features: np.ndarray) -> np.ndarray | float:
    """Fraction of trees voting positive; scalar for a single feature vector."""
    features = np.asarray(features, dtype=np.float64)
    single = features.ndim == 1
    x = features[None, :] if single else features
    if x.shape[1] != model.n_features:
        raise DataError(
            f"expected {model.n_features} features, got {x.shape[1]}"
        )
    if model.constant_class is not None:
        probs = np.full(x.shape[0], float(model.constant_class))
    else:
        votes = np.zeros(x.shape[0])
        for tree in model.trees:
            votes += tree.predict(x)
        probs = votes / len(model.trees)
    return float(probs[0]) if single else probs


def classify(model: ForestModel, features: np.ndarray, threshold: float = 0.5) -> np.ndarray:
    """Class decisions at the given vote-fraction threshold (strict >)."""
    probs = predict_forest(model, np.atleast_2d(features))
    return (np.asarray(probs) > threshold).astype(np.int8)


def feature_importance(model: ForestModel) -> np.ndarray:
    """Mean Gini impurity decrease per feature, normalized to sum to 1.

    Falls back to uniform weights when no split ever reduced impurity
    (degenerate models included).
    """
    total = model.importance_raw.sum()
    if total <= 0.0:
        return np.full(model.n_features, 1.0 / model.n_features)
    return model.importance_raw / total
