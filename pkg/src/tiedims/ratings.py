"""Word-rating matrices and rank-correlation statistics.

Raters score each word on a 1..5 scale for how well it describes their
relationships. Every word then has a rating vector across raters, and the
word-word Spearman correlation matrix is the substrate for clustering.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, ParseError
from .ranking import fractional_ranks

logger = logging.getLogger(__name__)

MISSING = -1.0  # placeholder inside the assembly grid, never survives imputation


@dataclass
class RatingMatrix:
    """Words x raters grid of ratings, fully imputed.

    ``values[i, j]`` is word i's rating by rater j. Missing entries were
    filled with the rater's median rating, so medians of odd/even rating
    counts make half-steps possible. ``rater_attrs`` holds optional
    demographic columns (e.g. gender, age, race) keyed by column name.
    """

    words: list[str]
    raters: list[str]
    values: np.ndarray
    rater_attrs: dict[str, list[str]] = field(default_factory=dict)
    n_imputed: int = 0

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape  # type: ignore[return-value]

    def grand_mean(self, words: list[str]) -> float:
        idx = [self.words.index(w) for w in words]
        return float(self.values[idx].mean())


@dataclass
class CorrelationMatrix:
    """Symmetric words x words grid of rank-correlation coefficients."""

    words: list[str]
    values: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.words)
        if self.values.shape != (n, n):
            raise ValueError("correlation grid does not match word list")


def load_ratings(path: str | Path) -> RatingMatrix:
    """Read a delimited ratings file with header word,rater,rating[,attrs...].

    Ratings must be integers in [1, 5]; an empty rating field marks a
    missing entry. Duplicate (word, rater) pairs keep the last value with a
    warning. Raters with no present ratings are dropped with a warning, and
    remaining missing entries are imputed by the rater's median rating.
    """
    words: list[str] = []
    raters: list[str] = []
    word_idx: dict[str, int] = {}
    rater_idx: dict[str, int] = {}
    cells: dict[tuple[int, int], float] = {}
    attrs: dict[str, dict[int, str]] = {}
    duplicates = 0

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ParseError("empty ratings file", 1)
        header = [h.strip().lower() for h in reader.fieldnames]
        for col in ("word", "rater", "rating"):
            if col not in header:
                raise ParseError(f"header must declare a '{col}' column", 1)
        attr_cols = [h for h in header if h not in ("word", "rater", "rating")]

        for line_no, row in enumerate(reader, start=2):
            row = {k.strip().lower(): (v or "").strip() for k, v in row.items() if k}
            word = row.get("word", "").lower()
            rater = row.get("rater", "")
            if not word or not rater:
                raise ParseError("missing word or rater field", line_no)
            raw = row.get("rating", "")
            if raw == "":
                rating = None  # explicit missing marker
            else:
                try:
                    rating = int(raw)
                except ValueError:
                    raise ParseError(f"rating {raw!r} is not an integer", line_no) from None
                if not 1 <= rating <= 5:
                    raise ParseError(f"rating {rating} outside [1, 5]", line_no)
            if word not in word_idx:
                word_idx[word] = len(words)
                words.append(word)
            if rater not in rater_idx:
                rater_idx[rater] = len(raters)
                raters.append(rater)
            wi, ri = word_idx[word], rater_idx[rater]
            if rating is not None:
                if (wi, ri) in cells:
                    duplicates += 1
                cells[(wi, ri)] = float(rating)
            for col in attr_cols:
                if row.get(col):
                    attrs.setdefault(col, {})[ri] = row[col]

    if duplicates:
        logger.warning("%s: %d duplicate (word, rater) pair(s), last value kept", path, duplicates)

    grid = np.full((len(words), len(raters)), MISSING)
    for (wi, ri), val in cells.items():
        grid[wi, ri] = val

    # drop raters who never produced a usable rating
    present = grid != MISSING
    keep = present.any(axis=0)
    if not keep.all():
        dropped = [raters[j] for j in np.flatnonzero(~keep)]
        logger.warning("%s: dropped rater(s) with zero ratings: %s", path, ", ".join(dropped))
    kept_idx = np.flatnonzero(keep)
    grid = grid[:, kept_idx]
    present = present[:, kept_idx]
    kept_raters = [raters[j] for j in kept_idx]

    n_imputed = 0
    for j in range(grid.shape[1]):
        missing = ~present[:, j]
        if missing.any():
            median = float(np.median(grid[present[:, j], j]))
            grid[missing, j] = median
            n_imputed += int(missing.sum())

    rater_attrs = {
        col: [mapping.get(ri, "") for ri in kept_idx] for col, mapping in attrs.items()
    }
    return RatingMatrix(
        words=words, raters=kept_raters, values=grid,
        rater_attrs=rater_attrs, n_imputed=n_imputed,
    )


def spearman_correlation(values: np.ndarray) -> np.ndarray:
    """Spearman matrix of the rows of ``values`` (variables x observations).

    Each row is converted to fractional average-tie ranks and the Pearson
    correlation of the rank vectors is taken. Rows with zero variance get
    correlation 0 off-diagonal (with a warning) so the matrix stays total;
    the diagonal is exactly 1.
    """
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    ranks = np.empty_like(values)
    for i in range(n):
        ranks[i] = fractional_ranks(values[i])

    centered = ranks - ranks.mean(axis=1, keepdims=True)
    norms = np.sqrt((centered**2).sum(axis=1))
    degenerate = norms == 0.0
    if degenerate.any():
        logger.warning("%d degenerate (zero-variance) row(s); correlations set to 0",
                       int(degenerate.sum()))
    safe = np.where(degenerate, 1.0, norms)
    unit = centered / safe[:, None]
    corr = unit @ unit.T
    corr = np.clip(corr, -1.0, 1.0)
    corr[degenerate, :] = 0.0
    corr[:, degenerate] = 0.0
    np.fill_diagonal(corr, 1.0)
    return corr


def spearman_matrix(r: RatingMatrix) -> CorrelationMatrix:
    """Word-word Spearman rank correlation matrix of a rating matrix."""
    return CorrelationMatrix(words=list(r.words), values=spearman_correlation(r.values))


def _binarize(r: RatingMatrix, attribute: str, group_a: set[str] | None) -> tuple[list[int], list[int]]:
    if attribute not in r.rater_attrs:
        raise DataError(f"rating matrix has no rater attribute {attribute!r}")
    values = r.rater_attrs[attribute]
    if group_a is not None:
        a = [j for j, v in enumerate(values) if v in group_a]
        b = [j for j, v in enumerate(values) if v and v not in group_a]
        return a, b
    # numeric median split: above median vs at-or-below
    numeric: list[tuple[int, float]] = []
    for j, v in enumerate(values):
        if v == "":
            continue
        try:
            numeric.append((j, float(v)))
        except ValueError:
            raise DataError(
                f"attribute {attribute!r} is not numeric; pass explicit group values"
            ) from None
    if not numeric:
        raise DataError(f"attribute {attribute!r} has no usable values")
    median = float(np.median([v for _, v in numeric]))
    a = [j for j, v in numeric if v > median]
    b = [j for j, v in numeric if v <= median]
    return a, b


def split_consistency(
    r: RatingMatrix, attribute: str, *, group_a: set[str] | None = None
) -> float:
    """Agreement of the word-word correlation structure across a rater split.

    Raters are split in two by ``attribute``: either membership in
    ``group_a`` versus the rest, or an above/below-median split for numeric
    attributes. The word-word correlation matrix is computed per group and
    the Pearson correlation between the two matrices' upper-triangle entries
    is returned.
    """
    a, b = _binarize(r, attribute, group_a)
    if len(a) < 2 or len(b) < 2:
        raise DataError(
            f"split on {attribute!r} needs at least 2 raters per group "
            f"(got {len(a)} and {len(b)})"
        )
    iu = np.triu_indices(len(r.words), k=1)
    if iu[0].size < 2:
        raise DataError("need at least 3 words to compare correlation structure")
    tri_a = spearman_correlation(r.values[:, a])[iu]
    tri_b = spearman_correlation(r.values[:, b])[iu]
    sa, sb = tri_a.std(), tri_b.std()
    if sa == 0.0 or sb == 0.0:
        raise DataError("degenerate correlation structure in one rater group")
    return float(np.corrcoef(tri_a, tri_b)[0, 1])
