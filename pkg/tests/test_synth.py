import pytest

from tiedims.errors import ConfigError
from tiedims.labeling import label_graph
from tiedims.synth import SynthParams, synth_graph


def edges_of(g):
    return set(g.edges())


class TestSynthGraph:
    def test_same_seed_bit_identical(self, tiny_lexicon):
        params = SynthParams(closure={"trust": 0.4, "fun": 0.1}, untyped_fraction=0.2)
        g1, t1 = synth_graph(40, 0.05, params, tiny_lexicon, seed=7)
        g2, t2 = synth_graph(40, 0.05, params, tiny_lexicon, seed=7)
        assert edges_of(g1) == edges_of(g2)
        assert t1.labels == t2.labels
        assert all(g1.bag(u, v) == g2.bag(u, v) for u, v in g1.edges())

    def test_different_seed_differs(self, tiny_lexicon):
        params = SynthParams(closure={"trust": 0.4})
        g1, _ = synth_graph(40, 0.05, params, tiny_lexicon, seed=1)
        g2, _ = synth_graph(40, 0.05, params, tiny_lexicon, seed=2)
        assert edges_of(g1) != edges_of(g2)

    def test_zero_closure_keeps_seed_graph(self, tiny_lexicon):
        params = SynthParams(closure={"trust": 0.0, "fun": 0.0})
        g, truth = synth_graph(40, 0.08, params, tiny_lexicon, seed=3)
        assert truth.n_closed_edges == 0
        assert g.n_edges == truth.n_seed_edges

    def test_full_closure_closes_every_trusted_two_path(self, tiny_lexicon):
        params = SynthParams(closure={"trust": 1.0, "fun": 0.0})
        g, truth = synth_graph(25, 0.08, params, tiny_lexicon, seed=5)
        for u, w in g.edges():
            if truth.labels[(u, w)] != "trust":
                continue
            for v in g.out_neighbors(w):
                if v != u:
                    assert g.has_edge(u, v), f"unclosed trusted 2-path {u}->{w}->{v}"

    def test_every_edge_has_one_planted_dimension_or_none(self, tiny_lexicon):
        params = SynthParams(closure={"trust": 0.3, "fun": 0.2}, untyped_fraction=0.3)
        g, truth = synth_graph(50, 0.05, params, tiny_lexicon, seed=9)
        assert set(truth.labels) == edges_of(g)
        assert all(d in (None, "trust", "fun") for d in truth.labels.values())
        planted = set(truth.labels.values())
        assert None in planted and ("trust" in planted or "fun" in planted)

    def test_labels_recoverable_without_noise(self, tiny_lexicon):
        params = SynthParams(closure={"trust": 0.2, "fun": 0.2},
                             noise_words_per_edge=0, untyped_fraction=0.0)
        g, truth = synth_graph(40, 0.05, params, tiny_lexicon, seed=11)
        labels = label_graph(g, tiny_lexicon)
        for edge, planted in truth.labels.items():
            assert labels[edge].dimension == planted

    def test_untyped_edges_label_untyped_without_noise_collisions(self, tiny_lexicon):
        params = SynthParams(closure={"trust": 0.1}, untyped_fraction=1.0)
        g, truth = synth_graph(30, 0.05, params, tiny_lexicon, seed=13)
        labels = label_graph(g, tiny_lexicon)
        assert all(lbl.dimension == "untyped" for lbl in labels.values())
        assert all(d is None for d in truth.labels.values())

    def test_closure_probability_out_of_range(self, tiny_lexicon):
        with pytest.raises(ConfigError, match="not in"):
            synth_graph(10, 0.1, SynthParams(closure={"trust": 1.5}), tiny_lexicon, seed=0)

    def test_closure_dimension_missing_from_lexicon(self, tiny_lexicon):
        with pytest.raises(ConfigError, match="no words"):
            synth_graph(10, 0.1, SynthParams(closure={"respect": 0.5}), tiny_lexicon, seed=0)

    def test_too_few_nodes(self, tiny_lexicon):
        with pytest.raises(ConfigError, match="3 nodes"):
            synth_graph(2, 0.1, SynthParams(closure={"trust": 0.5}), tiny_lexicon, seed=0)

    def test_dimension_weights_validated(self, tiny_lexicon):
        with pytest.raises(ConfigError, match="unknown closure"):
            synth_graph(10, 0.1, SynthParams(closure={"trust": 0.5},
                                             dimension_weights={"fun": 1.0}),
                        tiny_lexicon, seed=0)

    def test_weights_bias_planting(self, tiny_lexicon):
        params = SynthParams(closure={"trust": 0.0, "fun": 0.0},
                             dimension_weights={"trust": 9.0, "fun": 1.0})
        _, truth = synth_graph(60, 0.05, params, tiny_lexicon, seed=17)
        counts = {"trust": 0, "fun": 0}
        for d in truth.labels.values():
            counts[d] += 1
        assert counts["trust"] > counts["fun"] * 3
