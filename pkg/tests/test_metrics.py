import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stepgan.embeddings import EmbeddingSet
from stepgan.errors import (
    DegenerateCovariance,
    DegenerateInput,
    ExtractorMismatch,
    InvalidDistribution,
    MetricInputError,
)
from stepgan.metrics import (
    GaussianStats,
    fad,
    inception_score,
    kid,
    mmd_l1,
    pca_project,
)


def emb(vectors, tag="inception_variant", source=""):
    return EmbeddingSet(np.asarray(vectors, dtype=np.float64), tag, source)


class TestInceptionScore:
    def test_uniform_rows_give_exactly_one(self):
        probs = np.full((10, 5), 0.2)
        assert inception_score(probs) == 1.0
        assert inception_score(np.full((3500, 5), 0.2)) == 1.0

    def test_one_hot_balanced_gives_num_classes(self):
        probs = np.eye(5)[np.arange(20) % 5]
        assert abs(inception_score(probs) - 5.0) < 1e-9

    def test_hand_computed_two_class_case(self):
        probs = np.array([[0.9, 0.1], [0.1, 0.9]])
        # marginal [0.5, 0.5]; per-row KL = 0.9 ln 1.8 + 0.1 ln 0.2
        kl = 0.9 * math.log(0.9 / 0.5) + 0.1 * math.log(0.1 / 0.5)
        assert abs(inception_score(probs) - math.exp(kl)) < 1e-12

    def test_invalid_rows_raise(self):
        with pytest.raises(InvalidDistribution):
            inception_score(np.array([[0.5, 0.6]]))
        with pytest.raises(InvalidDistribution):
            inception_score(np.array([[1.2, -0.2]]))

    @given(
        st.lists(
            st.lists(st.floats(min_value=0.01, max_value=1.0), min_size=4, max_size=4),
            min_size=2,
            max_size=12,
        )
    )
    @settings(max_examples=50, deadline=None)
    def test_bounds_one_to_k(self, raw):
        probs = np.array(raw)
        probs /= probs.sum(axis=1, keepdims=True)
        score = inception_score(probs)
        assert 1.0 - 1e-9 <= score <= 4.0 + 1e-9


class TestFad:
    def test_identity_is_zero(self, rng):
        a = emb(rng.normal(size=(50, 8)))
        assert abs(fad(a, a)) < 1e-6

    def test_one_dimensional_gaussians_closed_form(self):
        # closed form: (mu1 - mu2)^2 + (s1 - s2)^2 = 1 for N(0,1) vs N(1,1)
        rng = np.random.default_rng(42)
        n = 100_000
        a = emb(rng.normal(0.0, 1.0, size=(n, 1)))
        b = emb(rng.normal(1.0, 1.0, size=(n, 1)))
        assert abs(fad(a, b) - 1.0) < 0.05

    def test_translation_gives_squared_norm(self, rng):
        v = np.array([0.5, -1.0, 2.0, 0.0, 0.25])
        base = rng.normal(size=(40, 5))
        a, b = emb(base), emb(base + v)
        assert abs(fad(a, b) - float(v @ v)) < 1e-6

    def test_symmetry(self, rng):
        a = emb(rng.normal(size=(30, 4)))
        b = emb(rng.normal(1.0, 2.0, size=(25, 4)))
        assert abs(fad(a, b) - fad(b, a)) < 1e-8

    def test_extractor_mismatch(self, rng):
        a = emb(rng.normal(size=(10, 4)), tag="vggish_like")
        b = emb(rng.normal(size=(10, 4)), tag="inception_variant")
        with pytest.raises(ExtractorMismatch):
            fad(a, b)

    def test_degenerate_covariance(self, rng):
        a = emb(rng.normal(size=(1, 4)))
        b = emb(rng.normal(size=(10, 4)))
        with pytest.raises(DegenerateCovariance):
            fad(a, b)

    def test_gaussian_stats_psd(self, rng):
        stats = GaussianStats.fit(emb(rng.normal(size=(20, 6))))
        assert np.allclose(stats.cov, stats.cov.T, atol=1e-8)
        assert np.linalg.eigvalsh(stats.cov).min() >= -1e-8


class TestKid:
    def test_same_distribution_concentrates_near_zero(self):
        rng = np.random.default_rng(7)
        n = 5000
        a = emb(rng.normal(size=(n, 8)))
        b = emb(rng.normal(size=(n, 8)))
        assert abs(kid(a, b)) < 1e-3

    def test_monotone_in_mean_shift(self, rng):
        base = rng.normal(size=(400, 6))
        values = []
        for shift in (0.5, 1.0, 2.0, 4.0):
            values.append(kid(emb(base), emb(base + shift)))
        assert values == sorted(values)
        assert values[0] > 0

    def test_singletons_rejected(self, rng):
        a = emb(rng.normal(size=(1, 4)))
        b = emb(rng.normal(size=(10, 4)))
        with pytest.raises(MetricInputError):
            kid(a, b)

    def test_matches_direct_estimator(self, rng):
        # independent brute-force unbiased estimator
        x = rng.normal(size=(6, 3))
        y = rng.normal(size=(5, 3))
        d = 3
        k = lambda u, v: (u @ v / d + 1.0) ** 3
        xx = np.mean([k(x[i], x[j]) for i in range(6) for j in range(6) if i != j])
        yy = np.mean([k(y[i], y[j]) for i in range(5) for j in range(5) if i != j])
        xy = np.mean([k(x[i], y[j]) for i in range(6) for j in range(5)])
        assert abs(kid(emb(x), emb(y)) - (xx + yy - 2 * xy)) < 1e-10


def mmd_brute_force(a, b):
    """All-pairs oracle with the singleton-within-term-0 convention."""
    a, b = np.atleast_2d(a), np.atleast_2d(b)
    n, m = len(a), len(b)
    cross = sum(np.abs(a[i] - b[j]).sum() for i in range(n) for j in range(m)) / (n * m)
    wa = (
        sum(np.abs(a[i] - a[j]).sum() for i in range(n) for j in range(n) if i != j)
        / (n * (n - 1))
        if n > 1
        else 0.0
    )
    wb = (
        sum(np.abs(b[i] - b[j]).sum() for i in range(m) for j in range(m) if i != j)
        / (m * (m - 1))
        if m > 1
        else 0.0
    )
    return 2 * cross - wa - wb


class TestMmdL1:
    def test_identical_multisets_match_brute_force_exactly(self, rng):
        # the diagonal-excluded estimator's self-distance is -2S/(n^2 (n-1)),
        # which the all-pairs oracle reproduces bit for bit
        v = rng.integers(-3, 4, size=(5, 4)).astype(float)
        assert mmd_l1(emb(v), emb(v)) == mmd_brute_force(v, v)
        s = sum(np.abs(v[i] - v[j]).sum() for i in range(5) for j in range(5))
        assert mmd_brute_force(v, v) == -2 * s / (25 * 4)

    def test_identical_point_masses_give_zero(self):
        v = np.tile([1.0, -2.0, 3.0], (5, 1))
        assert mmd_l1(emb(v), emb(v)) == 0.0

    def test_zero_vs_one_gives_two(self):
        a, b = emb([[0.0]]), emb([[1.0]])
        assert mmd_l1(a, b) == 2.0

    def test_symmetric_exactly(self, rng):
        a = emb(rng.normal(size=(7, 3)))
        b = emb(rng.normal(size=(9, 3)))
        assert mmd_l1(a, b) == mmd_l1(b, a)

    def test_matches_brute_force_exactly_on_integer_vectors(self, rng):
        # integer-valued floats make every partial sum exact in float64
        for n, m in ((2, 3), (5, 5), (10, 7)):
            a = rng.integers(-5, 6, size=(n, 4)).astype(float)
            b = rng.integers(-5, 6, size=(m, 4)).astype(float)
            assert mmd_l1(emb(a), emb(b)) == mmd_brute_force(a, b)

    def test_matches_brute_force_on_random_floats(self, rng):
        a = rng.normal(size=(8, 5))
        b = rng.normal(size=(6, 5))
        assert abs(mmd_l1(emb(a), emb(b)) - mmd_brute_force(a, b)) < 1e-12


class TestPca:
    def test_rank_one_line_captured_by_first_component(self, rng):
        direction = rng.normal(size=16)
        t = rng.normal(size=(200, 1))
        a = emb(t * direction, source="a")
        proj = pca_project([a], k=2)
        assert proj.explained_variance_ratio[0] >= 0.999

    def test_rotation_invariance_of_ratios(self, rng):
        x = rng.normal(size=(100, 6)) * np.array([3.0, 2.0, 1.0, 0.5, 0.2, 0.1])
        q, _ = np.linalg.qr(rng.normal(size=(6, 6)))
        p1 = pca_project([emb(x, source="x")], k=2)
        p2 = pca_project([emb(x @ q.T, source="x")], k=2)
        np.testing.assert_allclose(
            p1.explained_variance_ratio, p2.explained_variance_ratio, atol=1e-6
        )

    def test_ratios_non_increasing_and_sum_below_one(self, rng):
        x = rng.normal(size=(60, 10))
        proj = pca_project([emb(x, source="x")], k=5)
        r = proj.explained_variance_ratio
        assert np.all(np.diff(r) <= 1e-12)
        assert r.sum() <= 1.0 + 1e-6

    def test_coords_split_per_source(self, rng):
        a = emb(rng.normal(size=(30, 5)), source="real")
        b = emb(rng.normal(size=(20, 5)), source="gen")
        proj = pca_project([a, b], k=2)
        assert proj.coords["real"].shape == (30, 2)
        assert proj.coords["gen"].shape == (20, 2)

    def test_degenerate_zero_variance(self):
        a = emb(np.zeros((10, 4)), source="z")
        with pytest.raises(DegenerateInput):
            pca_project([a], k=2)
