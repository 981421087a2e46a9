import math

import numpy as np
import pytest

from tiedims.errors import DataError, ParseError
from tiedims.ranking import fractional_ranks
from tiedims.ratings import (
    load_ratings,
    spearman_correlation,
    spearman_matrix,
    split_consistency,
)


def brute_ranks(values):
    """Midrank by counting: rank = 1 + #smaller + (#equal - 1) / 2."""
    out = []
    for v in values:
        smaller = sum(1 for w in values if w < v)
        equal = sum(1 for w in values if w == v)
        out.append(1.0 + smaller + (equal - 1) / 2.0)
    return out


def brute_pearson(a, b):
    n = len(a)
    ma = sum(a) / n
    mb = sum(b) / n
    cov = sum((x - ma) * (y - mb) for x, y in zip(a, b))
    va = sum((x - ma) ** 2 for x in a)
    vb = sum((y - mb) ** 2 for y in b)
    return cov / math.sqrt(va * vb)


def brute_spearman(a, b):
    """Independent oracle: rank both vectors, then Pearson on the ranks."""
    return brute_pearson(brute_ranks(a), brute_ranks(b))


def write_ratings(path, rows, header="word,rater,rating"):
    path.write_text("\n".join([header] + rows) + "\n")
    return path


class TestFractionalRanks:
    @pytest.mark.parametrize("seed", range(5))
    def test_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.integers(0, 10, size=30).astype(float)
        assert np.allclose(fractional_ranks(x), brute_ranks(x.tolist()))

    def test_simple(self):
        assert fractional_ranks(np.array([10.0, 20.0, 20.0, 30.0])).tolist() == [1.0, 2.5, 2.5, 4.0]


class TestLoadRatings:
    def test_complete_matrix(self, tmp_path):
        path = write_ratings(tmp_path / "r.csv", [
            "alpha,r1,3", "alpha,r2,4", "beta,r1,1", "beta,r2,5",
        ])
        m = load_ratings(path)
        assert m.shape == (2, 2)
        assert m.n_imputed == 0
        assert m.values.tolist() == [[3, 4], [1, 5]]

    def test_missing_imputed_with_rater_median(self, tmp_path):
        # rater r1 rated {2, 4}; the missing cell gets median 3
        path = write_ratings(tmp_path / "r.csv", [
            "alpha,r1,2", "beta,r1,4", "alpha,r2,5", "beta,r2,1", "gamma,r2,3",
        ])
        m = load_ratings(path)
        gamma_r1 = m.values[m.words.index("gamma"), m.raters.index("r1")]
        assert gamma_r1 == 3.0
        assert m.n_imputed == 1

    def test_study_scale_shape(self, tmp_path):
        rng = np.random.default_rng(0)
        rows = [
            f"w{i:03d},r{j:03d},{rng.integers(1, 6)}"
            for i in range(220) for j in range(100)
        ]
        m = load_ratings(write_ratings(tmp_path / "big.csv", rows))
        assert m.shape == (220, 100)

    def test_rating_out_of_range(self, tmp_path):
        path = write_ratings(tmp_path / "r.csv", ["alpha,r1,6"])
        with pytest.raises(ParseError, match="outside"):
            load_ratings(path)

    def test_rating_not_integer(self, tmp_path):
        path = write_ratings(tmp_path / "r.csv", ["alpha,r1,nope"])
        with pytest.raises(ParseError, match="integer"):
            load_ratings(path)

    def test_duplicate_last_wins(self, tmp_path, caplog):
        path = write_ratings(tmp_path / "r.csv", ["alpha,r1,1", "alpha,r1,5"])
        with caplog.at_level("WARNING"):
            m = load_ratings(path)
        assert m.values[0, 0] == 5.0
        assert "duplicate" in caplog.text

    def test_rater_with_no_ratings_dropped(self, tmp_path, caplog):
        path = write_ratings(tmp_path / "r.csv", [
            "alpha,r1,2", "alpha,r2,", "beta,r1,4",
        ])
        with caplog.at_level("WARNING"):
            m = load_ratings(path)
        assert m.raters == ["r1"]
        assert "dropped" in caplog.text

    def test_missing_header_column(self, tmp_path):
        path = write_ratings(tmp_path / "r.csv", ["alpha,r1"], header="word,rater")
        with pytest.raises(ParseError, match="rating"):
            load_ratings(path)

    def test_attributes_kept(self, tmp_path):
        path = write_ratings(tmp_path / "r.csv", [
            "alpha,r1,3,f,30", "alpha,r2,4,m,40",
        ], header="word,rater,rating,gender,age")
        m = load_ratings(path)
        assert m.rater_attrs["gender"] == ["f", "m"]
        assert m.rater_attrs["age"] == ["30", "40"]


class TestSpearman:
    def test_identical_vectors(self):
        vals = np.array([[1, 2, 3, 4, 5], [1, 2, 3, 4, 5]], dtype=float)
        corr = spearman_correlation(vals)
        assert corr[0, 1] == pytest.approx(1.0, abs=1e-12)

    def test_reversed_rankings(self):
        vals = np.array([[1, 2, 3, 4, 5], [5, 4, 3, 2, 1]], dtype=float)
        assert spearman_correlation(vals)[0, 1] == pytest.approx(-1.0, abs=1e-12)

    def test_known_value(self):
        # ranks equal values here; hand-rolled rank-Pearson gives 0.8
        vals = np.array([[1, 2, 3, 4], [1, 3, 2, 4]], dtype=float)
        assert spearman_correlation(vals)[0, 1] == pytest.approx(0.8, abs=1e-12)
        assert brute_spearman([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_brute_oracle_with_ties(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.integers(1, 6, size=50).astype(float)
        b = rng.integers(1, 6, size=50).astype(float)
        got = spearman_correlation(np.vstack([a, b]))[0, 1]
        assert got == pytest.approx(brute_spearman(a.tolist(), b.tolist()), abs=1e-12)

    def test_zero_variance_word(self, caplog):
        vals = np.array([[3, 3, 3, 3], [1, 2, 3, 4], [4, 3, 2, 1]], dtype=float)
        with caplog.at_level("WARNING"):
            corr = spearman_correlation(vals)
        assert corr[0, 1] == 0.0
        assert corr[0, 2] == 0.0
        assert corr[0, 0] == 1.0
        assert "degenerate" in caplog.text

    def test_matrix_invariants(self):
        rng = np.random.default_rng(7)
        vals = rng.integers(1, 6, size=(12, 30)).astype(float)
        corr = spearman_correlation(vals)
        assert np.array_equal(corr, corr.T)
        assert np.all(np.diag(corr) == 1.0)
        assert np.all(corr >= -1.0) and np.all(corr <= 1.0)

    @pytest.mark.parametrize("transform", [
        lambda x: np.exp(x),
        lambda x: x**3 + 2 * x,
        lambda x: 10 * x - 3,
    ])
    def test_rank_invariance_under_monotone_transform(self, transform):
        rng = np.random.default_rng(11)
        vals = rng.integers(1, 6, size=(5, 40)).astype(float)
        base = spearman_correlation(vals)
        warped = vals.copy()
        warped[2] = transform(warped[2])
        assert np.allclose(spearman_correlation(warped), base, atol=1e-12)

    def test_spearman_matrix_wrapper(self, tmp_path):
        path = write_ratings(tmp_path / "r.csv", [
            "alpha,r1,1", "alpha,r2,2", "alpha,r3,3",
            "beta,r1,3", "beta,r2,2", "beta,r3,1",
        ])
        cm = spearman_matrix(load_ratings(path))
        assert cm.words == ["alpha", "beta"]
        assert cm.values[0, 1] == pytest.approx(-1.0)


class TestSplitConsistency:
    def _write(self, tmp_path, rows, header="word,rater,rating,grp"):
        return write_ratings(tmp_path / "r.csv", rows, header=header)

    def test_identical_groups_give_one(self, tmp_path):
        rng = np.random.default_rng(5)
        rows = []
        for i in range(6):
            for j in range(4):
                v = rng.integers(1, 6)
                rows.append(f"w{i},ra{j},{v},A")
                rows.append(f"w{i},rb{j},{v},B")  # clone rater in group B
        m = load_ratings(self._write(tmp_path, rows))
        assert split_consistency(m, "grp", group_a={"A"}) == pytest.approx(1.0, abs=1e-12)

    def test_random_ratings_near_zero(self, tmp_path):
        # independent uniform raters: structure agreement is pure noise
        for seed in range(5):
            rng = np.random.default_rng(seed)
            rows = []
            for i in range(60):
                for j in range(20):
                    grp = "A" if j < 10 else "B"
                    rows.append(f"w{i:03d},r{j:02d},{rng.integers(1, 6)},{grp}")
            m = load_ratings(self._write(tmp_path, rows))
            assert abs(split_consistency(m, "grp", group_a={"A"})) < 0.25

    def test_median_split_on_numeric_attribute(self, tmp_path):
        rng = np.random.default_rng(9)
        rows = []
        for i in range(8):
            for j in range(10):
                rows.append(f"w{i},r{j},{rng.integers(1, 6)},{20 + j}")
        m = load_ratings(self._write(tmp_path, rows, header="word,rater,rating,age"))
        score = split_consistency(m, "age")
        assert -1.0 <= score <= 1.0

    def test_small_group_rejected(self, tmp_path):
        rows = ["w1,r1,1,A", "w1,r2,2,B", "w2,r1,3,A", "w2,r2,4,B", "w3,r1,5,A", "w3,r2,1,B"]
        m = load_ratings(self._write(tmp_path, rows))
        with pytest.raises(DataError, match="at least 2"):
            split_consistency(m, "grp", group_a={"A"})

    def test_unknown_attribute(self, tmp_path):
        m = load_ratings(write_ratings(tmp_path / "r.csv", ["w1,r1,3"]))
        with pytest.raises(DataError, match="attribute"):
            split_consistency(m, "gender")
