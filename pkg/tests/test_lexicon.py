import numpy as np
import pytest

from tiedims.blockmodel import ClusterNode, ClusterTree
from tiedims.errors import ConfigError, ParseError
from tiedims.lexicon import Lexicon, LexiconEntry, export_lexicon, load_lexicon, save_lexicon


def tree_with_leaves(*leaves):
    """leaves: (leaf_id, polarity, words) triples assembled into a flat tree."""
    nodes = [ClusterNode(words=list(w), mean_corr=0.5, polarity=p, leaf_id=i)
             for i, p, w in leaves]
    root = nodes[0]
    for other in nodes[1:]:
        root = ClusterNode(words=root.words + other.words, mean_corr=0.1,
                           left=root, right=other)
    all_words = [w for _, _, ws in leaves for w in ws]
    return ClusterTree(root=root, words=all_words)


class TestLexiconType:
    def test_unknown_dimension_rejected(self):
        with pytest.raises(ConfigError, match="unknown dimension"):
            Lexicon({"comedy": LexiconEntry("positive", frozenset({"lol"}))})

    def test_bad_polarity_rejected(self):
        with pytest.raises(ConfigError, match="polarity"):
            Lexicon({"fun": LexiconEntry("sideways", frozenset({"lol"}))})

    def test_word_in_two_dimensions_same_polarity_rejected(self):
        with pytest.raises(ConfigError, match="appears in both"):
            Lexicon({
                "fun": LexiconEntry("positive", frozenset({"laugh"})),
                "trust": LexiconEntry("positive", frozenset({"laugh"})),
            })

    def test_word_shared_across_polarities_allowed(self):
        lex = Lexicon({
            "fun": LexiconEntry("positive", frozenset({"wild"})),
            "conflict": LexiconEntry("negative", frozenset({"wild"})),
        })
        assert lex.words("fun") == {"wild"}

    def test_empty_words_rejected_for_bearing_dimension(self):
        with pytest.raises(ConfigError, match="non-empty"):
            Lexicon({"trust": LexiconEntry("positive", frozenset())})

    def test_lexicon_less_dimension_may_be_empty(self):
        lex = Lexicon({"similarity": LexiconEntry("both", frozenset())})
        assert "similarity" in lex
        assert lex.bearing_dimensions() == ()

    def test_bearing_excludes_wordless_and_nonmatching(self, small_lexicon):
        assert small_lexicon.bearing_dimensions() == (
            "social_support", "trust", "power", "respect", "romance", "fun", "conflict",
        )

    def test_uppercase_word_rejected(self):
        with pytest.raises(ConfigError, match="lowercase"):
            Lexicon({"fun": LexiconEntry("positive", frozenset({"LOL"}))})


class TestExportLexicon:
    def test_named_leaf_exported(self):
        tree = tree_with_leaves(("leaf01", "positive", ["laughter", "joy", "humor"]),
                                ("leaf02", "negative", ["hate"]))
        lex = export_lexicon(tree, {"leaf01": "fun", "leaf02": "discard"})
        assert lex.dimensions() == ("fun",)
        assert lex.words("fun") == {"laughter", "joy", "humor"}
        assert lex.entry("fun").polarity == "positive"

    def test_all_discarded_gives_empty_lexicon(self, tmp_path):
        tree = tree_with_leaves(("leaf01", "positive", ["joy"]),
                                ("leaf02", "negative", ["hate"]))
        lex = export_lexicon(tree, {"leaf01": "discard", "leaf02": "discard"})
        assert len(lex) == 0
        with pytest.raises(ConfigError, match="empty"):
            save_lexicon(lex, tmp_path / "lex.tsv")

    def test_same_polarity_leaves_unioned(self):
        tree = tree_with_leaves(("leaf01", "negative", ["hate", "anger"]),
                                ("leaf02", "negative", ["fight"]))
        lex = export_lexicon(tree, {"leaf01": "conflict", "leaf02": "conflict"})
        assert lex.words("conflict") == {"hate", "anger", "fight"}
        assert lex.entry("conflict").polarity == "negative"

    def test_mixed_polarity_becomes_both(self):
        tree = tree_with_leaves(("leaf01", "positive", ["love"]),
                                ("leaf02", "negative", ["unloving"]))
        lex = export_lexicon(tree, {"leaf01": "romance", "leaf02": "romance"})
        assert lex.entry("romance").polarity == "both"

    def test_unknown_leaf_id_lists_valid_ids(self):
        tree = tree_with_leaves(("leaf01", "positive", ["joy"]),
                                ("leaf02", "negative", ["hate"]))
        with pytest.raises(ConfigError, match="leaf01, leaf02"):
            export_lexicon(tree, {"leaf99": "fun"})

    def test_name_outside_enumeration_rejected(self):
        tree = tree_with_leaves(("leaf01", "positive", ["joy"]))
        with pytest.raises(ConfigError, match="unknown dimension"):
            export_lexicon(tree, {"leaf01": "happiness"})

    def test_untagged_tree_rejected(self):
        tree = tree_with_leaves(("leaf01", None, ["joy"]))
        with pytest.raises(ConfigError, match="assign_polarity"):
            export_lexicon(tree, {"leaf01": "fun"})

    def test_canonical_declaration_order(self):
        tree = tree_with_leaves(("leaf01", "negative", ["hate"]),
                                ("leaf02", "positive", ["faith"]),
                                ("leaf03", "positive", ["hug"]))
        lex = export_lexicon(tree, {"leaf01": "conflict", "leaf02": "trust",
                                    "leaf03": "social_support"})
        assert lex.dimensions() == ("social_support", "trust", "conflict")


class TestLexiconIO:
    def test_roundtrip(self, small_lexicon, tmp_path):
        path = tmp_path / "lex.tsv"
        save_lexicon(small_lexicon, path)
        loaded = load_lexicon(path)
        assert loaded.dimensions() == small_lexicon.dimensions()
        for dim, entry in small_lexicon.items():
            assert loaded.words(dim) == entry.words
            assert loaded.entry(dim).polarity == entry.polarity

    def test_declaration_order_preserved(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("fun\tpositive\tlol haha\ntrust\tpositive\tfaith\n")
        lex = load_lexicon(path)
        assert lex.dimensions() == ("fun", "trust")

    def test_comments_and_blanks_ignored(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("# comment\n\nfun\tpositive\tlol\n")
        assert load_lexicon(path).dimensions() == ("fun",)

    def test_malformed_line(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("just-one-field\n")
        with pytest.raises(ParseError, match="line 1"):
            load_lexicon(path)

    def test_duplicate_dimension(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("fun\tpositive\tlol\nfun\tpositive\thaha\n")
        with pytest.raises(ParseError, match="duplicate"):
            load_lexicon(path)

    def test_invalid_content_reported(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("comedy\tpositive\tlol\n")
        with pytest.raises(ParseError, match="unknown dimension"):
            load_lexicon(path)
