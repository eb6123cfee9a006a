import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evpricing.moo import polynomial_mutation, sbx_crossover

XL, XU = np.zeros(6), np.ones(6)


def parents(seed=0):
    rng = np.random.default_rng(seed)
    return rng.random(6), rng.random(6)


class TestSbx:
    def test_zero_probability_is_identity(self):
        a, b = parents()
        c1, c2 = sbx_crossover(a, b, XL, XU, np.random.default_rng(1), prob=0.0)
        np.testing.assert_array_equal(c1, a)
        np.testing.assert_array_equal(c2, b)

    def test_identical_parents(self):
        a, _ = parents()
        c1, c2 = sbx_crossover(a, a.copy(), XL, XU, np.random.default_rng(1), prob=1.0, prob_var=1.0)
        np.testing.assert_array_equal(c1, a)
        np.testing.assert_array_equal(c2, a)

    def test_deterministic(self):
        a, b = parents()
        r1 = sbx_crossover(a, b, XL, XU, np.random.default_rng(5))
        r2 = sbx_crossover(a, b, XL, XU, np.random.default_rng(5))
        assert r1[0].tobytes() == r2[0].tobytes() and r1[1].tobytes() == r2[1].tobytes()

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            sbx_crossover(np.zeros(3), np.zeros(4), 0, 1, np.random.default_rng(0))

    def test_mean_preserved_per_variable(self):
        # SBX children are symmetric about the parents' midpoint before clipping
        a, b = np.full(4, 0.4), np.full(4, 0.6)
        c1, c2 = sbx_crossover(a, b, -100, 100, np.random.default_rng(2), prob=1.0, prob_var=1.0)
        np.testing.assert_allclose(c1 + c2, a + b)

    def test_batch_matches_shape(self):
        rng = np.random.default_rng(0)
        A, B = rng.random((10, 6)), rng.random((10, 6))
        c1, c2 = sbx_crossover(A, B, XL, XU, rng)
        assert c1.shape == c2.shape == (10, 6)

    @settings(max_examples=100)
    @given(st.integers(0, 2**32 - 1))
    def test_within_bounds(self, seed):
        rng = np.random.default_rng(seed)
        lo, hi = -rng.random(6), 1 + rng.random(6)
        a, b = rng.uniform(lo, hi), rng.uniform(lo, hi)
        for c in sbx_crossover(a, b, lo, hi, rng, prob=1.0, prob_var=1.0):
            assert np.all(c >= lo) and np.all(c <= hi)


class TestMutation:
    def test_zero_probability_is_identity(self):
        g, _ = parents()
        np.testing.assert_array_equal(polynomial_mutation(g, XL, XU, np.random.default_rng(0), prob=0.0), g)

    def test_degenerate_box(self):
        g = np.full(6, 0.3)
        out = polynomial_mutation(g, g, g, np.random.default_rng(0), prob=1.0)
        np.testing.assert_array_equal(out, g)

    def test_deterministic(self):
        g, _ = parents()
        a = polynomial_mutation(g, XL, XU, np.random.default_rng(9), prob=1.0)
        b = polynomial_mutation(g, XL, XU, np.random.default_rng(9), prob=1.0)
        assert a.tobytes() == b.tobytes()
        assert not np.array_equal(a, g)

    def test_default_rate_is_one_over_n(self):
        rng = np.random.default_rng(0)
        G = rng.random((4000, 50))
        changed = polynomial_mutation(G, 0, 1, rng) != G
        assert changed.mean() == pytest.approx(1 / 50, rel=0.1)

    @settings(max_examples=100)
    @given(st.integers(0, 2**32 - 1))
    def test_within_bounds(self, seed):
        rng = np.random.default_rng(seed)
        g = rng.random(6)
        out = polynomial_mutation(g, XL, XU, rng, prob=1.0)
        assert np.all(out >= 0) and np.all(out <= 1)
