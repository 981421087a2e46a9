from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tiedims.graph import build_graph
from tiedims.labeling import (
    EdgeLabel,
    label_edge,
    label_graph,
    label_histogram,
    load_labels,
    save_labels,
    tokenize,
)


class TestTokenize:
    def test_lowercase_and_punctuation(self):
        assert tokenize("Trust you!!") == Counter({"trust": 1, "you": 1})

    def test_empty(self):
        assert tokenize("") == Counter()

    def test_counts_preserved_across_separators(self):
        # split on '-' and whitespace, case folded: three "ha" tokens
        assert tokenize("ha-ha HA") == Counter({"ha": 3})

    def test_short_tokens_dropped(self):
        assert tokenize("a i x7 ok") == Counter({"x7": 1, "ok": 1})

    def test_digits_kept(self):
        assert tokenize("see u 2morrow 42") == Counter({"see": 1, "2morrow": 1, "42": 1})

    @given(st.text())
    def test_tokens_are_lowercase_and_long_enough(self, text):
        bag = tokenize(text)
        for token, count in bag.items():
            assert count > 0
            assert token == token.lower()
            assert len(token) >= 2


class TestLabelEdge:
    def test_no_hits_is_untyped(self, tiny_lexicon):
        lbl = label_edge(Counter({"hello": 1}), tiny_lexicon)
        assert lbl.dimension == "untyped"
        assert lbl.match_counts == {"trust": 0, "fun": 0}

    def test_highest_tally_wins(self, tiny_lexicon):
        lbl = label_edge(Counter({"trust": 1, "lol": 1, "haha": 1}), tiny_lexicon)
        assert lbl.dimension == "fun"
        assert lbl.match_counts == {"trust": 1, "fun": 2}

    def test_tie_broken_by_declaration_order(self, tiny_lexicon):
        lbl = label_edge(Counter({"trust": 1, "lol": 1}), tiny_lexicon)
        assert lbl.dimension == "trust"

    def test_occurrences_vs_types(self, tiny_lexicon):
        bag = Counter({"trust": 3, "lol": 1, "haha": 1})
        assert label_edge(bag, tiny_lexicon).dimension == "trust"
        assert label_edge(bag, tiny_lexicon, count_types=True).dimension == "fun"

    def test_scaling_invariance(self, tiny_lexicon):
        bag = Counter({"trust": 2, "lol": 1, "noise": 5})
        base = label_edge(bag, tiny_lexicon).dimension
        for scale in (2, 3, 7):
            scaled = Counter({t: c * scale for t, c in bag.items()})
            assert label_edge(scaled, tiny_lexicon).dimension == base

    def test_unmatched_token_never_changes_label(self, small_lexicon):
        bag = Counter({"trust": 1, "lol": 2})
        before = label_edge(bag, small_lexicon)
        bag["zzzunknown"] = 9
        after = label_edge(bag, small_lexicon)
        assert before.dimension == after.dimension
        assert before.match_counts == after.match_counts


class TestLabelGraph:
    def test_empty_graph(self, tiny_lexicon):
        g, _ = build_graph([])
        assert label_graph(g, tiny_lexicon) == {}

    def test_all_empty_bags_untyped(self, tiny_lexicon):
        g, _ = build_graph([("a", "b", ""), ("b", "c", "")])
        labels = label_graph(g, tiny_lexicon)
        assert all(lbl.dimension == "untyped" for lbl in labels.values())

    def test_consistent_with_label_edge(self, small_lexicon):
        g, _ = build_graph([
            ("a", "b", "trust you, my reliable friend"),
            ("b", "c", "lol haha joke fight"),
        ])
        labels = label_graph(g, small_lexicon)
        for (u, v), lbl in labels.items():
            assert lbl == label_edge(g.bag(u, v), small_lexicon)

    def test_histogram(self, tiny_lexicon):
        g, _ = build_graph([("a", "b", "trust"), ("a", "c", "lol"), ("c", "b", "xyz")])
        labels = label_graph(g, tiny_lexicon)
        assert label_histogram(labels) == {"fun": 1, "trust": 1, "untyped": 1}

    def test_save_load_roundtrip(self, tiny_lexicon, tmp_path):
        g, _ = build_graph([("a", "b", "trust trust lol"), ("b", "a", "nothing here")])
        labels = label_graph(g, tiny_lexicon)
        path = tmp_path / "labels.jsonl"
        save_labels(labels, path)
        assert load_labels(path) == labels


def test_edge_label_is_value_object():
    a = EdgeLabel("trust", {"trust": 1})
    b = EdgeLabel("trust", {"trust": 1})
    assert a == b
    with pytest.raises(AttributeError):
        a.dimension = "fun"  # type: ignore[misc]
