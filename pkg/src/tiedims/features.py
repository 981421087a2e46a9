"""Pair sampling and link-prediction features.

Triangle overlap is the directed common-neighbor fraction; the dimension
vector refines its numerator by partitioning common neighbors according to
the labeled dimension of the edge that connects them to the source node.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .dimensions import UNTYPED
from .errors import ConfigError, DataError, ShortfallError
from .graph import CommGraph
from .labeling import EdgeLabel

# graphs at least this large switch from exhaustive negative enumeration
# to rejection sampling of random 2-paths
EXHAUSTIVE_BELOW = 10_000


@dataclass(frozen=True)
class PairSample:
    """A candidate user pair with its label and (optional) features."""

    u: str
    v: str
    positive: bool
    to: float | None = None
    dims: dict[str, int] | None = None


def triangle_overlap(g: CommGraph, u: str, v: str) -> float:
    """|out(u) & in(v)| / |out(u)|, defined as 0 when u has no out-edges."""
    out_u = g.out_neighbors(u)
    if not out_u:
        return 0.0
    return len(out_u & g.in_neighbors(v)) / len(out_u)


def dimension_vector(
    g: CommGraph,
    labels: Mapping[tuple[str, str], EdgeLabel],
    u: str,
    v: str,
    dims: Sequence[str],
    *,
    witness_side: str = "source",
) -> dict[str, int]:
    """Common neighbors of (u, v) partitioned by edge dimension.

    For each common neighbor w the counter of the dimension labeling edge
    (u, w) is incremented (or edge (w, v) with ``witness_side="target"``).
    Unmatched edges land in the ``untyped`` bucket, so the entries always
    sum to the common-neighbor count.
    """
    if witness_side not in ("source", "target"):
        raise ConfigError(f"witness_side must be 'source' or 'target', got {witness_side!r}")
    vec = {d: 0 for d in dims}
    vec[UNTYPED] = 0
    for w in g.out_neighbors(u) & g.in_neighbors(v):
        edge = (u, w) if witness_side == "source" else (w, v)
        try:
            label = labels[edge]
        except KeyError:
            raise DataError(f"edge {edge!r} has no label; label the whole graph first") from None
        dim = label.dimension
        if dim not in vec:
            dim = UNTYPED
        vec[dim] += 1
    return vec


def _negative_candidates(g: CommGraph) -> list[tuple[str, str]]:
    """All ordered pairs (u, v) with no edge u->v but some 2-path u->w->v."""
    out: list[tuple[str, str]] = []
    for u in sorted(g.nodes):
        out_u = g.out_neighbors(u)
        if not out_u:
            continue
        reach: set[str] = set()
        for w in out_u:
            reach |= g.out_neighbors(w)
        reach -= out_u
        reach.discard(u)
        out.extend((u, v) for v in sorted(reach))
    return out


def sample_pairs(
    g: CommGraph,
    n_pos: int,
    n_neg: int,
    seed: int,
    *,
    exhaustive_below: int = EXHAUSTIVE_BELOW,
) -> list[PairSample]:
    """Sample positive pairs (existing edges) and 2-hop negative pairs.

    Positives are drawn uniformly without replacement from the edge set.
    Negatives are pairs with no u->v edge but at least one directed 2-path
    u->w->v: enumerated exhaustively on small graphs, rejection-sampled
    from random 2-paths on large ones. Deterministic for a given seed.
    """
    if n_pos < 1 or n_neg < 1:
        raise ConfigError("n_pos and n_neg must be positive")
    rng = np.random.default_rng(seed)
    edges = list(g.edges())
    if len(edges) < n_pos:
        raise ShortfallError("not enough edges for positive pairs", n_pos, len(edges))
    pos_idx = rng.choice(len(edges), size=n_pos, replace=False)
    positives = [PairSample(u=edges[int(i)][0], v=edges[int(i)][1], positive=True)
                 for i in sorted(pos_idx)]

    if g.n_nodes < exhaustive_below:
        candidates = _negative_candidates(g)
        if len(candidates) < n_neg:
            raise ShortfallError(
                "not enough 2-hop negative pairs", n_neg, len(candidates)
            )
        neg_idx = rng.choice(len(candidates), size=n_neg, replace=False)
        negatives = [PairSample(u=candidates[int(i)][0], v=candidates[int(i)][1], positive=False)
                     for i in sorted(neg_idx)]
    else:
        chosen: set[tuple[str, str]] = set()
        budget = 50 * n_neg
        attempts = 0
        while len(chosen) < n_neg and attempts < budget:
            attempts += 1
            u, w = edges[int(rng.integers(0, len(edges)))]
            out_w = sorted(g.out_neighbors(w))
            if not out_w:
                continue
            v = out_w[int(rng.integers(0, len(out_w)))]
            if v == u or g.has_edge(u, v):
                continue
            chosen.add((u, v))
        if len(chosen) < n_neg:
            raise ShortfallError(
                "rejection sampling budget exhausted for negative pairs", n_neg, len(chosen)
            )
        negatives = [PairSample(u=u, v=v, positive=False) for u, v in sorted(chosen)]
    return positives + negatives


def featurize(
    g: CommGraph,
    labels: Mapping[tuple[str, str], EdgeLabel],
    pairs: Sequence[PairSample],
    dims: Sequence[str],
    *,
    normalized: bool = False,
    witness_side: str = "source",
) -> list[PairSample]:
    """Attach triangle overlap and dimension-vector features to pairs.

    ``normalized`` divides the dimension counts by |out(u)| (mirroring the
    triangle-overlap denominator) instead of keeping raw counts.
    """
    out: list[PairSample] = []
    for pair in pairs:
        to = triangle_overlap(g, pair.u, pair.v)
        vec = dimension_vector(g, labels, pair.u, pair.v, dims, witness_side=witness_side)
        if normalized:
            denom = len(g.out_neighbors(pair.u))
            vec = {d: c / denom if denom else 0.0 for d, c in vec.items()}  # type: ignore[misc]
        out.append(replace(pair, to=to, dims=vec))
    return out


def feature_matrix(
    pairs: Sequence[PairSample], feature_set: str, dims: Sequence[str]
) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Stack pair features into (X, y, feature_names) for a feature set.

    Feature sets: ``to`` (triangle overlap only), ``dims`` (the dimension
    vector), ``both`` (their concatenation).
    """
    if feature_set not in ("to", "dims", "both"):
        raise ConfigError(f"unknown feature set {feature_set!r}")
    names: list[str] = []
    if feature_set in ("to", "both"):
        names.append("triangle_overlap")
    dim_cols = [*dims, UNTYPED] if feature_set in ("dims", "both") else []
    names.extend(dim_cols)
    rows = []
    y = np.empty(len(pairs), dtype=np.int8)
    for i, pair in enumerate(pairs):
        if pair.to is None or pair.dims is None:
            raise DataError("pairs must be featurized first")
        row: list[float] = []
        if feature_set in ("to", "both"):
            row.append(pair.to)
        row.extend(float(pair.dims[d]) for d in dim_cols)
        rows.append(row)
        y[i] = 1 if pair.positive else 0
    return np.asarray(rows, dtype=np.float64), y, names
