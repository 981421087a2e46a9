"""Directed communication graph with per-edge token bags.

A node is an opaque string identifier. An edge (u, v) means u has sent at
least one message to v; the edge carries the merged bag of words of all
messages sent on it. The graph is immutable once built and keeps exact
mirror indexes of out- and in-neighbors, so concurrent readers are safe.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .errors import NotFoundError, ParseError
from .labeling import merge_bags, tokenize

logger = logging.getLogger(__name__)

EDGE_FILE_FORMATS = ("jsonl",)


class CommGraph:
    """Immutable directed multigraph collapsed to one token bag per edge."""

    __slots__ = ("_nodes", "_out", "_in", "_bags", "_edge_list")

    def __init__(
        self,
        bags: Mapping[tuple[str, str], Mapping[str, int]],
        extra_nodes: Iterable[str] = (),
    ):
        out: dict[str, set[str]] = {}
        inn: dict[str, set[str]] = {}
        clean: dict[tuple[str, str], Counter[str]] = {}
        nodes: set[str] = set(extra_nodes)
        for (src, dst) in sorted(bags):
            if src == dst:
                raise ValueError(f"self-loop not allowed: {src!r}")
            bag = bags[(src, dst)]
            for token, count in bag.items():
                if count <= 0 or token != token.lower():
                    raise ValueError(
                        f"invalid token {token!r} (count {count}) on edge {src!r}->{dst!r}"
                    )
            clean[(src, dst)] = Counter(bag)
            nodes.add(src)
            nodes.add(dst)
            out.setdefault(src, set()).add(dst)
            inn.setdefault(dst, set()).add(src)
        self._nodes = frozenset(nodes)
        self._out = {u: frozenset(vs) for u, vs in out.items()}
        self._in = {v: frozenset(us) for v, us in inn.items()}
        self._bags = clean
        self._edge_list: tuple[tuple[str, str], ...] = tuple(clean)

    @property
    def nodes(self) -> frozenset[str]:
        return self._nodes

    @property
    def n_nodes(self) -> int:
        return len(self._nodes)

    @property
    def n_edges(self) -> int:
        return len(self._bags)

    def edges(self) -> Iterator[tuple[str, str]]:
        """Iterate edges in sorted (src, dst) order."""
        return iter(self._edge_list)

    def has_edge(self, src: str, dst: str) -> bool:
        return (src, dst) in self._bags

    def bag(self, src: str, dst: str) -> Counter[str]:
        """Token bag of an edge. Treat the result as read-only."""
        try:
            return self._bags[(src, dst)]
        except KeyError:
            raise NotFoundError(f"no edge {src!r} -> {dst!r}") from None

    def out_neighbors(self, u: str) -> frozenset[str]:
        self._check_node(u)
        return self._out.get(u, frozenset())

    def in_neighbors(self, u: str) -> frozenset[str]:
        self._check_node(u)
        return self._in.get(u, frozenset())

    def _check_node(self, u: str) -> None:
        if u not in self._nodes:
            raise NotFoundError(f"unknown node {u!r}")

    def __repr__(self) -> str:
        return f"CommGraph(n_nodes={self.n_nodes}, n_edges={self.n_edges})"


def neighbors(g: CommGraph, u: str, direction: str) -> frozenset[str]:
    """Out- or in-neighbor set of a node; never contains the node itself."""
    if direction == "out":
        return g.out_neighbors(u)
    if direction == "in":
        return g.in_neighbors(u)
    raise ValueError(f"direction must be 'out' or 'in', got {direction!r}")


def build_graph(records: Iterable[tuple[str, str, str]]) -> tuple[CommGraph, int]:
    """Assemble a graph from (src, dst, text) records.

    Messages for duplicate (src, dst) pairs are merged into one bag.
    Self-loop records are skipped; the skip count is returned alongside the
    graph so callers can surface it.
    """
    per_edge: dict[tuple[str, str], list[Counter[str]]] = {}
    skipped = 0
    for src, dst, text in records:
        if src == dst:
            skipped += 1
            continue
        per_edge.setdefault((src, dst), []).append(tokenize(text))
    bags = {edge: merge_bags(parts) for edge, parts in per_edge.items()}
    return CommGraph(bags), skipped


def load_graph(path: str | Path, fmt: str = "jsonl") -> CommGraph:
    """Load a graph from an edge-message file.

    The ``jsonl`` format holds one flat JSON object per line with string
    fields ``src``, ``dst`` and ``text``. Malformed records raise a
    :class:`ParseError` naming the line; self-loop records are skipped with
    a logged warning count.
    """
    if fmt not in EDGE_FILE_FORMATS:
        raise ValueError(f"unknown edge-message format {fmt!r}; supported: {EDGE_FILE_FORMATS}")

    def _records() -> Iterator[tuple[str, str, str]]:
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"invalid JSON: {exc.msg}", line_no) from exc
                if not isinstance(rec, dict):
                    raise ParseError("record is not an object", line_no)
                src, dst, text = rec.get("src"), rec.get("dst"), rec.get("text")
                if not isinstance(src, str) or not src:
                    raise ParseError("missing or empty 'src' field", line_no)
                if not isinstance(dst, str) or not dst:
                    raise ParseError("missing or empty 'dst' field", line_no)
                if not isinstance(text, str):
                    raise ParseError("missing 'text' field", line_no)
                yield src, dst, text

    g, skipped = build_graph(_records())
    if skipped:
        logger.warning("%s: skipped %d self-loop record(s)", path, skipped)
    logger.info("%s: loaded %d nodes, %d edges", path, g.n_nodes, g.n_edges)
    return g


def save_graph(g: CommGraph, path: str | Path) -> None:
    """Write the graph as an edge-message file that reloads identically.

    Each edge becomes one record whose text repeats every token by its
    count, so load -> save -> load round-trips node set, edge set and bags.
    Degree-zero nodes cannot be expressed in the edge-message format and are
    dropped with a warning.
    """
    with open(path, "w", encoding="utf-8") as fh:
        for src, dst in g.edges():
            bag = g.bag(src, dst)
            text = " ".join(
                token for token in sorted(bag) for _ in range(bag[token])
            )
            fh.write(json.dumps({"src": src, "dst": dst, "text": text}, sort_keys=True) + "\n")
    isolated = g.nodes - {u for e in g.edges() for u in e}
    if isolated:
        logger.warning("%s: %d degree-zero node(s) not representable, dropped", path, len(isolated))


def summary(g: CommGraph) -> str:
    """One-line plain-text graph summary for stdout reporting."""
    return f"nodes={g.n_nodes} edges={g.n_edges}"
