"""Dimension lexicons: polarity-signed word sets per relationship dimension.

A lexicon maps dimension names to word sets elicited from people describing
their relationships. Dimension order is preserved everywhere because it
doubles as the canonical tie-break order during edge labeling.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Mapping

from .blockmodel import ClusterTree
from .dimensions import DIMENSIONS, LEXICON_BEARING, LEXICON_LESS
from .errors import ConfigError, ParseError

POLARITIES = ("positive", "negative", "both")

DISCARD = "discard"


@dataclass(frozen=True)
class LexiconEntry:
    polarity: str
    words: frozenset[str]


class Lexicon:
    """Ordered mapping from dimension name to polarity-signed word set."""

    def __init__(self, entries: Mapping[str, LexiconEntry]):
        seen: dict[str, dict[str, str]] = {p: {} for p in ("positive", "negative")}
        for dim, entry in entries.items():
            if dim not in DIMENSIONS:
                raise ConfigError(
                    f"unknown dimension {dim!r}; valid names: {', '.join(DIMENSIONS)}"
                )
            if entry.polarity not in POLARITIES:
                raise ConfigError(f"{dim}: polarity must be one of {POLARITIES}")
            if not entry.words and dim not in LEXICON_LESS:
                raise ConfigError(
                    f"{dim}: word set must be non-empty (only "
                    f"{', '.join(LEXICON_LESS)} may be word-less)"
                )
            sides = ("positive", "negative") if entry.polarity == "both" else (entry.polarity,)
            for word in entry.words:
                if word != word.lower() or not word:
                    raise ConfigError(f"{dim}: word {word!r} must be non-empty lowercase")
                for side in sides:
                    if word in seen[side]:
                        raise ConfigError(
                            f"word {word!r} appears in both {seen[side][word]!r} and "
                            f"{dim!r} within the {side} polarity"
                        )
                    seen[side][word] = dim
        self._entries = dict(entries)

    def __contains__(self, dim: str) -> bool:
        return dim in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def dimensions(self) -> tuple[str, ...]:
        return tuple(self._entries)

    def bearing_dimensions(self) -> tuple[str, ...]:
        """Dimensions usable for matching: lexicon-bearing with words, in order."""
        return tuple(
            dim for dim in self._entries
            if dim in LEXICON_BEARING and self._entries[dim].words
        )

    def entry(self, dim: str) -> LexiconEntry:
        return self._entries[dim]

    def words(self, dim: str) -> frozenset[str]:
        return self._entries[dim].words

    def items(self) -> Iterator[tuple[str, LexiconEntry]]:
        return iter(self._entries.items())

    def __repr__(self) -> str:
        parts = ", ".join(f"{d}:{len(e.words)}" for d, e in self._entries.items())
        return f"Lexicon({parts})"


def export_lexicon(tree: ClusterTree, naming: Mapping[str, str]) -> Lexicon:
    """Build a lexicon from named tree leaves.

    ``naming`` maps leaf ids to a dimension name or ``discard``; leaves it
    does not mention are not exported. Leaves of the same polarity mapped
    to one dimension have their words unioned; mixed-polarity sources yield
    polarity "both".
    """
    leaves = {leaf.leaf_id: leaf for leaf in tree.leaves()}
    unknown = sorted(set(naming) - set(leaves))
    if unknown:
        raise ConfigError(
            f"naming refers to unknown leaf id(s) {', '.join(unknown)}; "
            f"valid ids: {', '.join(sorted(leaves))}"  # type: ignore[arg-type]
        )

    collected: dict[str, tuple[set[str], set[str]]] = {}  # dim -> (words, polarities)
    for leaf_id, dim in naming.items():
        if dim == DISCARD:
            continue
        if dim not in DIMENSIONS:
            raise ConfigError(
                f"{leaf_id}: unknown dimension {dim!r}; valid names: "
                f"{', '.join(DIMENSIONS)} or '{DISCARD}'"
            )
        leaf = leaves[leaf_id]
        if leaf.polarity is None:
            raise ConfigError("tree has no polarity tags; run assign_polarity first")
        words, polarities = collected.setdefault(dim, (set(), set()))
        words.update(leaf.words)
        polarities.add(leaf.polarity)

    entries: dict[str, LexiconEntry] = {}
    for dim in DIMENSIONS:  # canonical declaration order
        if dim not in collected:
            continue
        words, polarities = collected[dim]
        polarity = polarities.pop() if len(polarities) == 1 else "both"
        entries[dim] = LexiconEntry(polarity=polarity, words=frozenset(words))
    return Lexicon(entries)


def save_lexicon(lex: Lexicon, path: str | Path) -> None:
    """Write a lexicon as flat text: dimension, polarity, word list per line."""
    if len(lex) == 0:
        raise ConfigError("refusing to save an empty lexicon")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# dimension\tpolarity\twords (space-separated)\n")
        for dim, entry in lex.items():
            fh.write(f"{dim}\t{entry.polarity}\t{' '.join(sorted(entry.words))}\n")


def load_lexicon(path: str | Path) -> Lexicon:
    """Read a lexicon file written by :func:`save_lexicon` (or by hand).

    Dimension declaration order in the file is preserved and becomes the
    tie-break order for labeling.
    """
    entries: dict[str, LexiconEntry] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) not in (2, 3):
                raise ParseError(
                    "expected 'dimension<TAB>polarity<TAB>words'", line_no
                )
            dim, polarity = parts[0].strip(), parts[1].strip()
            words = frozenset(parts[2].split()) if len(parts) == 3 else frozenset()
            if dim in entries:
                raise ParseError(f"duplicate dimension {dim!r}", line_no)
            entries[dim] = LexiconEntry(polarity=polarity, words=words)
    try:
        return Lexicon(entries)
    except ConfigError as exc:
        raise ParseError(str(exc)) from exc
