import json

import pytest

from tiedims.lexicon import Lexicon, LexiconEntry


@pytest.fixture
def small_lexicon() -> Lexicon:
    """Seven-dimension lexicon with disjoint word sets, canonical order."""
    return Lexicon({
        "social_support": LexiconEntry("positive", frozenset({"help", "support", "comfort"})),
        "trust": LexiconEntry("positive", frozenset({"trust", "faith", "reliable"})),
        "power": LexiconEntry("negative", frozenset({"boss", "control", "obey"})),
        "respect": LexiconEntry("positive", frozenset({"admire", "respect", "honor"})),
        "romance": LexiconEntry("positive", frozenset({"love", "darling", "kiss"})),
        "fun": LexiconEntry("positive", frozenset({"lol", "haha", "joke"})),
        "conflict": LexiconEntry("negative", frozenset({"hate", "fight", "argue"})),
    })


@pytest.fixture
def tiny_lexicon() -> Lexicon:
    return Lexicon({
        "trust": LexiconEntry("positive", frozenset({"trust"})),
        "fun": LexiconEntry("positive", frozenset({"lol", "haha"})),
    })


def write_edge_file(path, records):
    """records: iterable of (src, dst, text)."""
    with open(path, "w", encoding="utf-8") as fh:
        for src, dst, text in records:
            fh.write(json.dumps({"src": src, "dst": dst, "text": text}) + "\n")
    return path
