"""Synthetic data with planted ground truth for desk-scale verification.

The graph generator plants a relationship dimension on every edge and then
closes directed triangles u -> w -> v into u -> v with a probability that
depends on the planted dimension of (u, w). The closure rule is applied to
exhaustion, so with probability 1 the generated graph is closed under it.
The planted labels and parameters come back as ground truth.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ConfigError
from .graph import CommGraph
from .lexicon import Lexicon
from .ratings import RatingMatrix


@dataclass(frozen=True)
class SynthParams:
    """Knobs of the planted-dimension generator.

    ``closure`` maps each planted dimension to the probability that an
    outgoing 2-path starting with an edge of that dimension is closed.
    Dimensions are planted proportionally to ``dimension_weights`` (uniform
    over the closure keys when omitted); a ``untyped_fraction`` share of
    edges gets no dimension and never triggers closure.
    """

    closure: Mapping[str, float]
    dimension_weights: Mapping[str, float] | None = None
    untyped_fraction: float = 0.0
    words_per_edge: int = 4
    noise_words_per_edge: int = 1
    noise_vocab_size: int = 200

    def validate(self, lexicon: Lexicon) -> None:
        if not self.closure:
            raise ConfigError("closure must name at least one dimension")
        for dim, p in self.closure.items():
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"closure probability for {dim!r} is {p}, not in [0, 1]")
            if dim not in lexicon or not lexicon.words(dim):
                raise ConfigError(
                    f"closure refers to dimension {dim!r} with no words in the lexicon"
                )
        if self.dimension_weights is not None:
            extra = set(self.dimension_weights) - set(self.closure)
            if extra:
                raise ConfigError(f"weights for unknown closure dimensions: {sorted(extra)}")
            if any(w < 0 for w in self.dimension_weights.values()):
                raise ConfigError("dimension weights must be non-negative")
            if sum(self.dimension_weights.values()) <= 0:
                raise ConfigError("dimension weights must not all be zero")
        if not 0.0 <= self.untyped_fraction <= 1.0:
            raise ConfigError("untyped_fraction must be in [0, 1]")
        if self.words_per_edge < 1:
            raise ConfigError("words_per_edge must be at least 1")
        if self.noise_words_per_edge < 0 or self.noise_vocab_size < 1:
            raise ConfigError("noise settings must be non-negative (vocab at least 1)")


@dataclass
class SynthTruth:
    """Planted per-edge dimension labels plus the closure parameters used."""

    labels: dict[tuple[str, str], str | None]
    params: SynthParams
    n_seed_edges: int = 0
    n_closed_edges: int = 0


def _node_name(i: int) -> str:
    return f"u{i:05d}"


def synth_graph(
    n_nodes: int,
    base_density: float,
    closure_params: SynthParams,
    lexicon: Lexicon,
    seed: int,
) -> tuple[CommGraph, SynthTruth]:
    """Generate a communication graph with planted dimensions.

    Pipeline: sample a directed seed graph with edge probability
    ``base_density``, plant a dimension (or nothing) on every edge, fill
    each edge's token bag from its dimension's lexicon words plus noise,
    then repeatedly close triangles u -> w -> v into u -> v with the
    closure probability of (u, w)'s planted dimension. Every candidate
    2-path is rolled exactly once. Same seed, same output, bit for bit.
    """
    if n_nodes < 3:
        raise ConfigError("need at least 3 nodes")
    if not 0.0 <= base_density <= 1.0:
        raise ConfigError("base_density must be in [0, 1]")
    closure_params.validate(lexicon)
    rng = np.random.default_rng(seed)

    dims = list(closure_params.closure)
    if closure_params.dimension_weights is not None:
        weights = np.array([closure_params.dimension_weights.get(d, 0.0) for d in dims])
    else:
        weights = np.ones(len(dims))
    weights = weights / weights.sum()
    dim_words = {d: sorted(lexicon.words(d)) for d in dims}
    lexicon_vocab = {w for d, e in lexicon.items() for w in e.words}
    noise_vocab = [f"nz{i:04d}" for i in range(closure_params.noise_vocab_size)]
    noise_vocab = [w for w in noise_vocab if w not in lexicon_vocab]

    nodes = [_node_name(i) for i in range(n_nodes)]
    labels: dict[tuple[str, str], str | None] = {}
    bags: dict[tuple[str, str], Counter[str]] = {}
    out_adj: dict[str, set[str]] = {u: set() for u in nodes}
    in_adj: dict[str, set[str]] = {u: set() for u in nodes}

    def plant(edge: tuple[str, str]) -> None:
        """Assign a dimension and token bag to a brand-new edge."""
        if closure_params.untyped_fraction > 0 and rng.random() < closure_params.untyped_fraction:
            dim = None
        else:
            dim = dims[int(rng.choice(len(dims), p=weights))]
        labels[edge] = dim
        bag: Counter[str] = Counter()
        if dim is None:
            n_noise = closure_params.words_per_edge + closure_params.noise_words_per_edge
        else:
            words = dim_words[dim]
            for i in rng.integers(0, len(words), size=closure_params.words_per_edge):
                bag[words[int(i)]] += 1
            n_noise = closure_params.noise_words_per_edge
        if noise_vocab and n_noise:
            for i in rng.integers(0, len(noise_vocab), size=n_noise):
                bag[noise_vocab[int(i)]] += 1
        bags[edge] = bag
        out_adj[edge[0]].add(edge[1])
        in_adj[edge[1]].add(edge[0])

    # seed graph: directed G(n, p) via unique off-diagonal pair codes
    n_pairs = n_nodes * (n_nodes - 1)
    m = int(rng.binomial(n_pairs, base_density))
    codes: set[int] = set()
    while len(codes) < m:
        draw = rng.integers(0, n_pairs, size=m - len(codes))
        codes.update(int(c) for c in draw)
    seed_edges = []
    for code in sorted(codes):
        i, r = divmod(code, n_nodes - 1)
        j = r if r < i else r + 1
        seed_edges.append((nodes[i], nodes[j]))
    for edge in seed_edges:
        plant(edge)

    # triangle closure to exhaustion: each (u, w, v) candidate rolls once
    tried: set[tuple[str, str, str]] = set()
    frontier = list(seed_edges)
    n_closed = 0
    while frontier:
        candidates: set[tuple[str, str, str]] = set()
        for (a, b) in frontier:
            for v in out_adj[b]:
                if a != v:
                    candidates.add((a, b, v))
            for y in in_adj[a]:
                if y != b:
                    candidates.add((y, a, b))
        frontier = []
        for u, w, v in sorted(candidates):
            if (u, w, v) in tried:
                continue
            tried.add((u, w, v))
            if v in out_adj[u]:
                continue
            dim = labels[(u, w)]
            p = closure_params.closure[dim] if dim is not None else 0.0
            if p > 0.0 and rng.random() < p:
                edge = (u, v)
                plant(edge)
                frontier.append(edge)
                n_closed += 1

    graph = CommGraph(bags, extra_nodes=nodes)
    truth = SynthTruth(
        labels=labels,
        params=closure_params,
        n_seed_edges=len(seed_edges),
        n_closed_edges=n_closed,
    )
    return graph, truth


@dataclass
class PlantedBlocks:
    """Ground truth of a planted two-block rating matrix."""

    block_of: dict[str, int]
    positive_block: int  # block generated with the higher rating level


def synth_ratings(
    n_words_per_block: int = 20,
    n_raters: int = 100,
    within: float = 0.8,
    cross: float = -0.6,
    seed: int = 0,
) -> tuple[RatingMatrix, PlantedBlocks]:
    """Two planted word blocks with controlled rank-correlation structure.

    Words in block 0 load on a latent rater factor, words in block 1 on an
    anti-correlated factor, giving approximately ``within`` correlation
    inside blocks and ``cross`` across them before discretization to the
    1..5 scale. Block 0 words are shifted high (positive valence), block 1
    words low.
    """
    if not 0.0 < within <= 1.0 or not -1.0 <= cross < 0.0:
        raise ConfigError("need within in (0, 1] and cross in [-1, 0)")
    if abs(cross) > within:
        raise ConfigError("|cross| cannot exceed within")
    rng = np.random.default_rng(seed)
    noise_var = 1.0 / within - 1.0
    factor_corr = cross / within
    z_a = rng.standard_normal(n_raters)
    z_b = factor_corr * z_a + np.sqrt(1.0 - factor_corr**2) * rng.standard_normal(n_raters)

    def block(z: np.ndarray, center: float) -> np.ndarray:
        latent = z[None, :] + np.sqrt(noise_var) * rng.standard_normal(
            (n_words_per_block, n_raters)
        )
        return np.clip(np.round(center + 1.1 * latent), 1, 5)

    values = np.vstack([block(z_a, 3.9), block(z_b, 2.1)])
    words = [f"plus{i:03d}" for i in range(n_words_per_block)] + [
        f"minus{i:03d}" for i in range(n_words_per_block)
    ]
    raters = [f"r{j:03d}" for j in range(n_raters)]
    block_of = {w: (0 if w.startswith("plus") else 1) for w in words}
    matrix = RatingMatrix(words=words, raters=raters, values=values.astype(np.float64))
    return matrix, PlantedBlocks(block_of=block_of, positive_block=0)
