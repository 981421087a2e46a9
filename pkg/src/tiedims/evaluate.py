"""Cross-validated evaluation of link-prediction feature sets.

Produces a three-row report (triangle overlap only, dimension vector only,
both combined) with precision, accuracy and AUC per fold and on average,
plus the dimension model's feature importances.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .errors import ConfigError, DataError
from .features import PairSample, feature_matrix
from .forest import ForestModel, ForestParams, feature_importance, predict_forest, train_forest
from .ranking import fractional_ranks

FEATURE_SET_NAMES = {"to": "triangle_overlap", "dims": "relationship_dimensions",
                     "both": "combined"}


def auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Probability a random positive outscores a random negative, ties half.

    Computed from rank sums, which equals the pairwise count with ties
    worth 0.5 but runs in O(n log n).
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    pos = y == 1
    n_pos = int(pos.sum())
    n_neg = s.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("AUC needs both classes present")
    ranks = fractional_ranks(s)
    rank_sum = float(ranks[pos].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def precision(pred: np.ndarray, y: np.ndarray) -> float:
    """Positive predictive value; 0.0 when nothing was predicted positive."""
    predicted_pos = pred == 1
    if not predicted_pos.any():
        return 0.0
    return float((y[predicted_pos] == 1).mean())


def accuracy(pred: np.ndarray, y: np.ndarray) -> float:
    return float((pred == y).mean())


def stratified_folds(y: np.ndarray, k: int, seed: int) -> list[np.ndarray]:
    """Split sample indices into k folds preserving the class ratio.

    Every sample lands in exactly one fold; per-class fold sizes differ by
    at most one. Raises if any fold would miss a class.
    """
    if k < 2:
        raise ConfigError("fold count must be at least 2")
    if y.shape[0] < k:
        raise ConfigError(f"cannot make {k} folds from {y.shape[0]} samples")
    rng = np.random.default_rng([seed, 0xF01D])
    folds: list[list[np.ndarray]] = [[] for _ in range(k)]
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        idx = idx[rng.permutation(idx.size)]
        for f, chunk in enumerate(np.array_split(idx, k)):
            folds[f].append(chunk)
    out = [np.sort(np.concatenate(parts)) for parts in folds]
    for f, test_idx in enumerate(out):
        if np.unique(y[test_idx]).size < 2:
            raise DataError(f"fold {f} lacks a class; not enough samples to stratify")
    return out


@dataclass
class FeatureSetResult:
    """Per-fold and mean metrics for one feature set."""

    feature_set: str
    name: str
    fold_precision: list[float]
    fold_accuracy: list[float]
    fold_auc: list[float]

    @property
    def mean_precision(self) -> float:
        return float(np.mean(self.fold_precision))

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.fold_accuracy))

    @property
    def mean_auc(self) -> float:
        return float(np.mean(self.fold_auc))


@dataclass
class EvalReport:
    """Evaluation results in the three-row feature-set shape."""

    rows: list[FeatureSetResult]
    importances: dict[str, float]
    params: ForestParams
    seed: int
    k: int
    n_pairs: int
    config_digest: str = ""
    version: str = field(default=__version__)

    def row(self, feature_set: str) -> FeatureSetResult:
        for r in self.rows:
            if r.feature_set == feature_set:
                return r
        raise KeyError(feature_set)

    def render_text(self) -> str:
        lines = [
            f"link prediction evaluation  (k={self.k} folds, n={self.n_pairs} pairs, "
            f"seed={self.seed})",
            f"forest: n_trees={self.params.n_trees} max_depth={self.params.max_depth} "
            f"min_leaf={self.params.min_leaf} features_per_split="
            f"{self.params.features_per_split or 'sqrt'}",
            f"config_digest: {self.config_digest or '-'}",
            f"toolkit_version: {self.version}",
            "",
            f"{'feature_set':<26}{'precision':>10}{'accuracy':>10}{'auc':>10}",
        ]
        for r in self.rows:
            lines.append(
                f"{r.name:<26}{r.mean_precision:>10.4f}{r.mean_accuracy:>10.4f}"
                f"{r.mean_auc:>10.4f}"
            )
        lines.append("")
        lines.append("dimension importances (sum to 1):")
        for name, weight in self.importances.items():
            lines.append(f"  {name:<24}{weight:>8.4f}")
        lines.append("")
        lines.append("per-fold AUC:")
        for r in self.rows:
            folds = " ".join(f"{v:.4f}" for v in r.fold_auc)
            lines.append(f"  {r.name:<24}{folds}")
        return "\n".join(lines) + "\n"

    def to_records(self) -> list[dict]:
        meta = {
            "record": "meta",
            "k": self.k,
            "n_pairs": self.n_pairs,
            "seed": self.seed,
            "config_digest": self.config_digest,
            "version": self.version,
            "forest": {
                "n_trees": self.params.n_trees,
                "max_depth": self.params.max_depth,
                "min_leaf": self.params.min_leaf,
                "features_per_split": self.params.features_per_split,
            },
        }
        records = [meta]
        for r in self.rows:
            records.append({
                "record": "feature_set",
                "feature_set": r.feature_set,
                "name": r.name,
                "fold_precision": r.fold_precision,
                "fold_accuracy": r.fold_accuracy,
                "fold_auc": r.fold_auc,
                "mean_precision": r.mean_precision,
                "mean_accuracy": r.mean_accuracy,
                "mean_auc": r.mean_auc,
            })
        records.append({"record": "importances", "weights": self.importances})
        return records

    def save(self, text_path: str | Path, jsonl_path: str | Path) -> None:
        Path(text_path).write_text(self.render_text(), encoding="utf-8")
        with open(jsonl_path, "w", encoding="utf-8") as fh:
            for rec in self.to_records():
                fh.write(json.dumps(rec, sort_keys=True) + "\n")


def _train_seed(seed: int, feature_set: str, fold: int) -> int:
    """Stable per-(feature set, fold) training seed derivation."""
    fs_code = {"to": 1, "dims": 2, "both": 3}[feature_set]
    return int(np.random.SeedSequence([seed, fs_code, fold]).generate_state(1)[0])


def cross_validate(
    pairs: Sequence[PairSample],
    dims: Sequence[str],
    *,
    k: int = 10,
    params: ForestParams = ForestParams(),
    seed: int,
    feature_sets: Sequence[str] = ("to", "dims", "both"),
    config_digest: str = "",
) -> EvalReport:
    """Stratified k-fold evaluation of each feature set.

    Per fold, a forest is trained on the other k-1 folds and scored on the
    held-out fold. Feature importances are the fold-mean importances of the
    dimension-vector model (or of the last feature set when ``dims`` is not
    evaluated).
    """
    matrices = {fs: feature_matrix(pairs, fs, dims) for fs in feature_sets}
    y = next(iter(matrices.values()))[1]
    folds = stratified_folds(y, k, seed)
    all_idx = np.arange(y.shape[0])

    rows: list[FeatureSetResult] = []
    importances: dict[str, float] = {}
    importance_source = "dims" if "dims" in feature_sets else feature_sets[-1]
    for fs in feature_sets:
        x, y_fs, names = matrices[fs]
        fold_prec: list[float] = []
        fold_acc: list[float] = []
        fold_auc: list[float] = []
        imp_acc = np.zeros(x.shape[1])
        for f, test_idx in enumerate(folds):
            train_mask = np.ones(y.shape[0], dtype=bool)
            train_mask[test_idx] = False
            train_idx = all_idx[train_mask]
            model: ForestModel = train_forest(
                x[train_idx], y_fs[train_idx], params,
                seed=_train_seed(seed, fs, f),
            )
            probs = np.asarray(predict_forest(model, x[test_idx]))
            pred = (probs > 0.5).astype(np.int8)
            fold_prec.append(precision(pred, y_fs[test_idx]))
            fold_acc.append(accuracy(pred, y_fs[test_idx]))
            fold_auc.append(auc(probs, y_fs[test_idx]))
            imp_acc += feature_importance(model)
        rows.append(FeatureSetResult(
            feature_set=fs, name=FEATURE_SET_NAMES[fs],
            fold_precision=fold_prec, fold_accuracy=fold_acc, fold_auc=fold_auc,
        ))
        if fs == importance_source:
            weights = imp_acc / len(folds)
            importances = {name: float(w) for name, w in zip(names, weights)}

    return EvalReport(
        rows=rows, importances=importances, params=params, seed=seed,
        k=k, n_pairs=len(pairs), config_digest=config_digest,
    )
