"""Recursive two-way blockmodeling of a word correlation matrix.

Each recursion step bipartitions a word set by spectral bisection of the
similarity graph derived from the correlation matrix. A split is kept only
while it does not lower the average within-cluster rank correlation;
otherwise the node stays a leaf. The first split of the full matrix
separates positively from negatively valenced words.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import DataError
from .ratings import CorrelationMatrix, RatingMatrix

logger = logging.getLogger(__name__)

# fixed start-vector seed keeps the iterative eigensolver reproducible
_FIEDLER_SEED = 20240 + 517
_ZERO_BAND = 1e-9


@dataclass
class ClusterNode:
    """Node of the binary cluster tree."""

    words: list[str]
    mean_corr: float
    left: "ClusterNode | None" = None
    right: "ClusterNode | None" = None
    polarity: str | None = None  # positive | negative | both, None before tagging
    leaf_id: str | None = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None and self.right is None


@dataclass
class ClusterTree:
    """Binary tree whose leaves are the final word clusters."""

    root: ClusterNode
    words: list[str] = field(default_factory=list)

    def leaves(self) -> list[ClusterNode]:
        return [n for n in self._walk(self.root) if n.is_leaf]

    def leaf_order_words(self) -> list[str]:
        """All words, ordered by leaf traversal (for matrix row re-ordering)."""
        out: list[str] = []
        for leaf in self.leaves():
            out.extend(leaf.words)
        return out

    def _walk(self, node: ClusterNode) -> Iterator[ClusterNode]:
        yield node
        if node.left is not None:
            yield from self._walk(node.left)
        if node.right is not None:
            yield from self._walk(node.right)

    def to_text(self) -> str:
        """Indented serialization: one line per node with size and mean correlation."""
        lines: list[str] = []

        def emit(node: ClusterNode, depth: int) -> None:
            pad = "  " * depth
            tags = []
            if node.polarity is not None:
                tags.append(f"polarity={node.polarity}")
            if node.is_leaf:
                tags.append(f"id={node.leaf_id}")
                tags.append("words=" + " ".join(node.words))
            head = f"{pad}{'leaf' if node.is_leaf else 'node'} size={len(node.words)} " \
                   f"mean_corr={node.mean_corr:.12g}"
            lines.append(" ".join([head] + tags) if tags else head)
            if node.left is not None:
                emit(node.left, depth + 1)
            if node.right is not None:
                emit(node.right, depth + 1)

        emit(self.root, 0)
        return "\n".join(lines) + "\n"


def _mean_pairwise(m: np.ndarray, idx: np.ndarray) -> float:
    """Mean of M_ij over unordered pairs i<j inside idx; 1.0 for singletons."""
    k = idx.size
    if k < 2:
        return 1.0
    sub = m[np.ix_(idx, idx)]
    return float((sub.sum() - np.trace(sub)) / (k * (k - 1)))


def _fiedler_vector(laplacian: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Eigenvector of the second-smallest Laplacian eigenvalue.

    Power iteration on the spectral complement B = c*I - L, deflated against
    the constant vector, converges to the Fiedler direction. The start
    vector comes from a seeded generator so results are reproducible.
    """
    n = laplacian.shape[0]
    bound = float(2.0 * laplacian.diagonal().max()) + 1.0  # >= lambda_max + 1
    comp = bound * np.eye(n) - laplacian
    ones = np.full(n, 1.0 / np.sqrt(n))
    v = rng.standard_normal(n)
    v -= (v @ ones) * ones
    norm = np.linalg.norm(v)
    if norm == 0.0:  # absurdly unlucky draw; any fixed fallback works
        v = np.arange(n, dtype=np.float64) - (n - 1) / 2.0
        norm = np.linalg.norm(v)
    v /= norm
    for _ in range(20000):
        w = comp @ v
        w -= (w @ ones) * ones
        norm = np.linalg.norm(w)
        if norm == 0.0:
            break
        w /= norm
        if np.max(np.abs(w - v)) < 1e-13:
            v = w
            break
        v = w
    return v


def _bisect(m_sub: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Split indices of a correlation submatrix in two by the Fiedler sign.

    Builds similarity s_ij = (corr + 1) / 2, forms the unnormalized graph
    Laplacian, and partitions by the sign of its Fiedler vector. Entries
    within 1e-9 of zero go to whichever side is currently smaller.
    Returns a boolean mask (True = side of the first decided word).
    """
    n = m_sub.shape[0]
    sim = (m_sub + 1.0) / 2.0
    np.fill_diagonal(sim, 0.0)
    laplacian = np.diag(sim.sum(axis=1)) - sim
    fiedler = _fiedler_vector(laplacian, rng)
    pos = fiedler > _ZERO_BAND
    neg = fiedler < -_ZERO_BAND
    mask = np.zeros(n, dtype=bool)
    mask[pos] = True
    n_pos, n_neg = int(pos.sum()), int(neg.sum())
    for i in np.flatnonzero(~pos & ~neg):
        if n_pos <= n_neg:
            mask[i] = True
            n_pos += 1
        else:
            n_neg += 1
    return mask


def blockmodel(m: CorrelationMatrix) -> ClusterTree:
    """Recursively bipartition the word set of a correlation matrix.

    Recursion at a node stops when (a) the size-weighted mean pairwise
    correlation of the two children is lower than the node's own, (b) a
    child would be a singleton, or (c) the node holds two or fewer words.
    The result is deterministic for a given matrix.
    """
    words = m.words
    values = m.values
    rng = np.random.default_rng(_FIEDLER_SEED)

    def recurse(idx: np.ndarray) -> ClusterNode:
        node_words = [words[i] for i in idx]
        mean_corr = _mean_pairwise(values, idx)
        node = ClusterNode(words=node_words, mean_corr=mean_corr)
        if idx.size <= 2:
            return node
        mask = _bisect(values[np.ix_(idx, idx)], rng)
        idx_a, idx_b = idx[mask], idx[~mask]
        if min(idx_a.size, idx_b.size) <= 1:
            return node
        mean_a = _mean_pairwise(values, idx_a)
        mean_b = _mean_pairwise(values, idx_b)
        child_stat = (idx_a.size * mean_a + idx_b.size * mean_b) / idx.size
        if child_stat < mean_corr:
            return node
        # deterministic child order: the side holding the parent's first word leads
        first, second = (idx_a, idx_b) if mask[0] else (idx_b, idx_a)
        node.left = recurse(first)
        node.right = recurse(second)
        return node

    root = recurse(np.arange(len(words)))
    tree = ClusterTree(root=root, words=list(words))
    for i, leaf in enumerate(tree.leaves(), start=1):
        leaf.leaf_id = f"leaf{i:02d}"
    return tree


def assign_polarity(tree: ClusterTree, r: RatingMatrix) -> ClusterTree:
    """Tag the root's two children positive/negative by grand-mean rating.

    The child whose words carry the higher grand-mean rating is positive,
    the other negative; tags propagate to every descendant. Equal means tag
    both subtrees "both" with a warning, since polarity is then undecidable.
    """
    root = tree.root
    if root.left is None or root.right is None:
        raise DataError("polarity needs a root split; the tree has a single cluster")
    mean_left = r.grand_mean(root.left.words)
    mean_right = r.grand_mean(root.right.words)
    if mean_left == mean_right:
        logger.warning("identical grand means (%.6g); polarity undecidable", mean_left)
        tag_left = tag_right = "both"
    elif mean_left > mean_right:
        tag_left, tag_right = "positive", "negative"
    else:
        tag_left, tag_right = "negative", "positive"

    def paint(node: ClusterNode, tag: str) -> None:
        node.polarity = tag
        if node.left is not None:
            paint(node.left, tag)
        if node.right is not None:
            paint(node.right, tag)

    paint(root.left, tag_left)
    paint(root.right, tag_right)
    return tree
