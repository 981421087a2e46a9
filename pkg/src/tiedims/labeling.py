"""Tokenization of message text and lexicon-based edge labeling.

Each directed edge carries a bag of words from the messages exchanged on it.
An edge is labeled with the dimension whose lexicon entry matches the most
bag tokens; edges with no match at all are labeled ``untyped``.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Mapping

from .dimensions import UNTYPED
from .errors import ParseError

if TYPE_CHECKING:
    from .graph import CommGraph
    from .lexicon import Lexicon

# Runs of letters/digits; everything else is a separator.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

# Tokens shorter than this are dropped (bare "a", "i", punctuation remnants).
_MIN_TOKEN_LEN = 2


def tokenize(text: str) -> Counter[str]:
    """Lowercase, split on non-letter/non-digit characters, keep counts.

    Tokens shorter than two characters are dropped. Empty text yields an
    empty bag.
    """
    bag: Counter[str] = Counter()
    for token in _TOKEN_RE.findall(text.lower()):
        if len(token) >= _MIN_TOKEN_LEN:
            bag[token] += 1
    return bag


@dataclass(frozen=True)
class EdgeLabel:
    """Labeling outcome for one edge.

    ``dimension`` is the argmax of ``match_counts`` under the lexicon's
    declaration order, or ``untyped`` when every tally is zero.
    """

    dimension: str
    match_counts: dict[str, int]


def label_edge(bag: Mapping[str, int], lex: "Lexicon", *, count_types: bool = False) -> EdgeLabel:
    """Label one token bag with the best-matching dimension.

    The tally for a dimension is the total number of bag token occurrences
    found in that dimension's word set. With ``count_types`` each matching
    token counts once regardless of its multiplicity. Ties are broken by the
    lexicon's dimension declaration order.
    """
    counts: dict[str, int] = {}
    for dim in lex.bearing_dimensions():
        words = lex.words(dim)
        tally = 0
        for token, n in bag.items():
            if token in words:
                tally += 1 if count_types else n
        counts[dim] = tally
    best_dim = UNTYPED
    best = 0
    for dim, tally in counts.items():  # declaration order; first max wins
        if tally > best:
            best_dim, best = dim, tally
    return EdgeLabel(dimension=best_dim, match_counts=counts)


def label_graph(
    g: "CommGraph", lex: "Lexicon", *, count_types: bool = False
) -> dict[tuple[str, str], EdgeLabel]:
    """Label every edge of the graph. Returns a mapping edge -> EdgeLabel."""
    return {
        (u, v): label_edge(g.bag(u, v), lex, count_types=count_types)
        for u, v in g.edges()
    }


def label_histogram(labels: Mapping[tuple[str, str], EdgeLabel]) -> dict[str, int]:
    """Count edges per assigned dimension (including ``untyped``)."""
    hist: Counter[str] = Counter(lbl.dimension for lbl in labels.values())
    return dict(sorted(hist.items(), key=lambda kv: (-kv[1], kv[0])))


def save_labels(labels: Mapping[tuple[str, str], EdgeLabel], path: str | Path) -> None:
    """Write labeled edges as line-delimited records: src, dst, dimension, tallies."""
    with open(path, "w", encoding="utf-8") as fh:
        for (src, dst) in sorted(labels):
            lbl = labels[(src, dst)]
            rec = {
                "src": src,
                "dst": dst,
                "dimension": lbl.dimension,
                "tallies": lbl.match_counts,
            }
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def load_labels(path: str | Path) -> dict[tuple[str, str], EdgeLabel]:
    """Read a labeled-edge file written by :func:`save_labels`."""
    labels: dict[tuple[str, str], EdgeLabel] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                labels[(rec["src"], rec["dst"])] = EdgeLabel(
                    dimension=rec["dimension"],
                    match_counts={k: int(v) for k, v in rec["tallies"].items()},
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"bad labeled-edge record: {exc}", line_no) from exc
    return labels


def merge_bags(bags: Iterable[Mapping[str, int]]) -> Counter[str]:
    """Union token bags, summing counts."""
    merged: Counter[str] = Counter()
    for bag in bags:
        merged.update(bag)
    return merged
