import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from tracetails.errors import DegenerateDistributionError, PreconditionError
from tracetails.gamma_core import GammaParams, gamma_cdf, gamma_pdf
from tracetails.gamma_mix import (GammaMix, GeneralGammaSum, divide, effective_shape, mix_cdf, mix_cf, mix_mean,
                                  mix_pdf, mix_sample, mix_scale, mix_variance, trace_estimator_law)

U_GRID = np.array([-10, -1, -0.1, 0.1, 1, 10], dtype=float)
weights = st.lists(st.floats(-3, 3).filter(lambda v: abs(v) > 1e-2), min_size=1, max_size=5)


class TestExamples:
    def test_mean(self):
        assert mix_mean(GammaMix([0.5, 0.5], 1, 1)) == 1.0
        assert mix_mean(GammaMix([1, -1], 1, 1)) == 0.0
        assert mix_mean(GammaMix([3, -1, 2], 5, 5)) == 4.0

    def test_variance(self):
        assert mix_variance(GammaMix([1], 1, 1)) == 1.0
        assert mix_variance(GammaMix([1, -1], 1, 1)) == 2.0
        assert mix_variance(trace_estimator_law([3, -1, 2], 10)) == pytest.approx(2.8, abs=1e-15)

    def test_scale(self):
        assert mix_scale(GammaMix([0.4, 0.4, 0.2], 1, 2)) == 0.2
        assert mix_scale(GammaMix([-3, 1], 1, 1)) == 3.0
        assert mix_scale(GammaMix([0.4, 0.4, 0.2], 1, 1)) == 0.4

    def test_effective_shape(self):
        assert effective_shape(GammaMix([1], 3.7, 1)) == 3.7
        assert effective_shape(GammaMix([0.4, 0.4, 0.2], 1, 1)) == pytest.approx(2.5, abs=1e-15)
        assert effective_shape(GammaMix([1, 1], 3, 1)) == 6.0
        with pytest.raises(PreconditionError):
            effective_shape(GammaMix([1, -1], 1, 1))
        with pytest.raises(PreconditionError):
            effective_shape(GammaMix([0, 0], 1, 1))

    def test_trace_estimator_law(self):
        q = trace_estimator_law([1], 2)
        assert (q.weights.tolist(), q.shape, q.rate) == ([1.0], 1.0, 1.0)
        q = trace_estimator_law([0.4, 0.4, 0.2], 6)
        assert (q.weights.tolist(), q.shape, q.rate) == ([0.4, 0.4, 0.2], 3.0, 3.0)
        z = trace_estimator_law([0, 0], 5)
        with pytest.raises(DegenerateDistributionError):
            mix_cdf(z, 0.1)

    def test_divide(self):
        d = divide(GammaMix([1], 2, 1), 2)
        assert (d.weights.tolist(), d.shape, d.rate) == ([1.0, 1.0], 1.0, 1.0)
        q = GammaMix([2, -1], 4, 2)
        same = divide(q, 1)
        assert same.weights.tolist() == q.weights.tolist() and same.shape == q.shape
        d4 = divide(q, 4)
        assert d4.weights.size == 8 and d4.shape == 1.0
        np.testing.assert_allclose(mix_cf(d4, U_GRID), mix_cf(q, U_GRID), rtol=0, atol=1e-12)

    def test_cf(self):
        assert mix_cf(GammaMix([1, -2], 1.5, 1), 0.0) == 1 + 0j
        assert mix_cf(GammaMix([1], 1, 1), 1.0) == pytest.approx(0.5 + 0.5j, abs=1e-15)
        assert mix_cf(GammaMix([1, -1], 1, 1), 1.0) == pytest.approx(0.5, abs=1e-15)

    def test_cdf(self):
        assert mix_cdf(GammaMix([1], 1, 1), math.log(2)) == pytest.approx(0.5, abs=1e-14)
        assert mix_cdf(GammaMix([1, -1], 1, 1), 0.0) == pytest.approx(0.5, abs=1e-12)
        assert mix_cdf(GammaMix([1, 1], 1, 1), 2.0) == pytest.approx(1 - 3 * math.exp(-2), abs=1e-12)
        assert mix_cdf(GammaMix([1, 1], 1, 1), 2.0, closed_form=False) == pytest.approx(1 - 3 * math.exp(-2),
                                                                                       abs=1e-10)

    def test_pdf(self):
        assert mix_pdf(GammaMix([1, -1], 1, 1), 0.0) == pytest.approx(0.5, abs=1e-12)
        q = GammaMix([1, 1], 1, 1)
        assert mix_pdf(q, 1.0) == pytest.approx(math.exp(-1), abs=1e-14)
        assert mix_pdf(q, 1.0, 1) == pytest.approx(0.0, abs=1e-14)
        assert mix_pdf(q, 1.0, closed_form=False) == pytest.approx(math.exp(-1), abs=1e-10)
        assert mix_pdf(q, 1.0, 1, closed_form=False) == pytest.approx(0.0, abs=1e-10)

    def test_pdf_order_guard(self):
        with pytest.raises(PreconditionError):
            mix_pdf(GammaMix([1, -1], 0.5, 1), 0.3, 1)
        with pytest.raises(PreconditionError):
            mix_pdf(GammaMix([1, -1], 2, 1), 0.3, 3)
        # Laplace: f'(x) = -sgn(x) e^{-|x|} / 2 away from the kink
        assert mix_pdf(GammaMix([1, -1], 1, 1), 0.3, 1) == pytest.approx(-0.5 * math.exp(-0.3), abs=1e-9)

    def test_sample_examples(self):
        assert mix_sample(GammaMix([1, 2], 1, 1), 0, 1).shape == (0,)
        x = mix_sample(GammaMix([1, -1], 1, 1), 10 ** 6, 3)
        assert abs(x.mean()) < 0.005
        q = GammaMix([0.4, 0.4, 0.2], 3, 3)
        y = np.sort(mix_sample(q, 10 ** 6, 4))
        ks = np.max(np.abs(mix_cdf(q, y) - np.arange(1, y.size + 1) / y.size))
        assert ks < 0.002


class TestOracles:
    # values frozen from a 30-digit mpmath Gil-Pelaez quadrature of the same law
    Q = GammaMix([1.5, -0.7, 0.4], 2.5, 2.0)

    def test_cdf_mpmath(self):
        ref = [0.013404422998273267, 0.16756722169855272, 0.45663245155283767, 0.87293976242400945]
        np.testing.assert_allclose(mix_cdf(self.Q, [-1.0, 0.3, 1.2, 3.0]), ref, rtol=0, atol=1e-12)

    def test_pdf_mpmath(self):
        ref = {0: [0.25623734290521951, 0.33890831830171724],
               1: [0.23830926799040537, -0.056779557072158317],
               2: [-0.1910608035097284, -0.24946985765712886]}
        for k, vals in ref.items():
            np.testing.assert_allclose(mix_pdf(self.Q, [0.3, 1.2], k), vals, rtol=0, atol=1e-11)

    def test_hypoexponential(self):
        # weights (2, 1), unit shapes: f(x) = exp(-x/2) - exp(-x)
        q = GammaMix([2, 1], 1, 1)
        x = np.array([0.05, 0.7, 3.0, 12.0, 40.0])
        np.testing.assert_allclose(mix_pdf(q, x), np.exp(-x / 2) - np.exp(-x), rtol=0, atol=1e-12)
        np.testing.assert_allclose(mix_cdf(q, x), 1 - 2 * np.exp(-x / 2) + np.exp(-x), rtol=0, atol=1e-12)

    def test_laplace(self):
        x = np.linspace(-20, 20, 81)
        ref = np.where(x < 0, 0.5 * np.exp(x), 1 - 0.5 * np.exp(-x))
        np.testing.assert_allclose(mix_cdf(GammaMix([1, -1], 1, 1), x), ref, rtol=0, atol=1e-12)

    def test_variance_gamma_density(self):
        # difference of Gamma(a,1) variables: density via Bessel K
        from scipy.special import gamma as G, kv
        a = 2.5
        x = np.array([0.1, 0.5, 2.0, 6.0])
        ref = np.abs(x) ** (a - 0.5) * kv(a - 0.5, np.abs(x)) / (math.sqrt(math.pi) * G(a) * 2 ** (a - 0.5))
        np.testing.assert_allclose(mix_pdf(GammaMix([1, -1], a, 1), x), ref, rtol=1e-10)

    def test_large_shape_against_gamma(self):
        q = GammaMix([1.0], 500, 500)
        x = np.linspace(0.85, 1.15, 31)
        np.testing.assert_allclose(mix_cdf(q, x, closed_form=False), gamma_cdf(GammaParams(500, 500), x),
                                   rtol=0, atol=1e-10)


class TestInvariants:
    @given(weights, st.floats(0.3, 4), st.floats(0.5, 3))
    def test_cdf_monotone_and_limits(self, w, a, b):
        q = GammaMix(w, a, b)
        m, s = mix_mean(q), math.sqrt(mix_variance(q))
        x = np.linspace(m - 8 * s, m + 8 * s, 161)
        f = mix_cdf(q, x)
        assert np.all(np.diff(f) >= -1e-10)
        assert mix_cdf(q, m - 50 * s) <= 1e-6 and mix_cdf(q, m + 50 * s) >= 1 - 1e-6

    @given(weights, st.floats(0.6, 4), st.floats(0.5, 3))
    def test_pdf_is_cdf_derivative(self, w, a, b):
        q = GammaMix(w, a, b)
        if a * len(w) <= 1.3:
            return
        m, s = mix_mean(q), math.sqrt(mix_variance(q))
        x = np.linspace(m - 6 * s, m + 6 * s, 41)
        x = x[np.abs(x) > 1e-3 * s]
        h = 1e-4 * s
        fd = (mix_cdf(q, x + h) - mix_cdf(q, x - h)) / (2 * h)
        assert np.max(np.abs(fd - mix_pdf(q, x))) <= 1e-5 / s

    @pytest.mark.parametrize("T", [2, 3, 7])
    def test_divide_preserves_cf(self, T):
        q = GammaMix([0.3, -1.2, 2.0], 1.7, 0.9)
        np.testing.assert_allclose(mix_cf(divide(q, T), U_GRID), mix_cf(q, U_GRID), rtol=0, atol=1e-12)

    @given(weights, st.randoms(use_true_random=False))
    def test_permutation_invariance(self, w, rnd):
        q = GammaMix(w, 1.3, 1.0)
        perm = list(w)
        rnd.shuffle(perm)
        x = np.linspace(-3, 3, 13)
        np.testing.assert_allclose(mix_cdf(GammaMix(perm, 1.3, 1.0), x), mix_cdf(q, x), rtol=0, atol=1e-12)

    @given(weights, st.integers(1, 4))
    def test_zero_padding_invariance(self, w, z):
        x = np.linspace(-3, 3, 13)
        a = mix_cdf(GammaMix(w, 1.3, 1.0), x)
        b = mix_cdf(GammaMix(list(w) + [0.0] * z, 1.3, 1.0), x)
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)

    def test_sample_moments(self):
        q = GammaMix([2.0, -0.5, 1.0], 1.5, 2.0)
        n = 10 ** 6
        x = mix_sample(q, n, 9)
        m, v = mix_mean(q), mix_variance(q)
        assert abs(x.mean() - m) < 4 * math.sqrt(v / n)
        # fourth central moment of the law bounds the variance of the sample variance
        kappa4 = sum(6 * wi ** 4 * 1.5 / 2.0 ** 4 for wi in q.weights)
        assert abs(x.var() - v) < 4 * math.sqrt((kappa4 + 2 * v * v) / n)

    @given(st.floats(0.05, 3), st.integers(1, 6), st.floats(0.2, 5), st.floats(0.2, 4))
    def test_closed_form_conformance(self, w, n, a, b):
        q = GammaMix([w] * n, a, b)
        p = GammaParams(n * a, b / w)
        x = np.linspace(0.05, 3, 9) * p.mean
        np.testing.assert_allclose(mix_cdf(q, x), gamma_cdf(p, x), rtol=0, atol=1e-9)
        if n * a > 1.5:
            np.testing.assert_allclose(mix_cdf(q, x, closed_form=False), gamma_cdf(p, x), rtol=0, atol=1e-9)

    def test_general_sum_terms(self):
        g = GeneralGammaSum.from_terms([(1.0, 2.0, 1.0), (-0.5, 1.0, 3.0)])
        assert mix_mean(g) == pytest.approx(2.0 - 0.5 / 3)
        assert mix_variance(g) == pytest.approx(2.0 + 0.25 / 9)
        assert mix_scale(g) == 1.0
        h = g.append(0.25, 1.0, 1.0)
        assert len(h) == 3 and len(g) == 2

    def test_general_sum_single_gamma(self):
        # Gamma(a, b) plus two Exp(b) with the same weight is Gamma(a + 2, b)
        g = GammaMix([1.0], 2.0, 1.5).general().append(1.0, 1.0, 1.5).append(1.0, 1.0, 1.5)
        x = np.linspace(0.2, 6, 12)
        np.testing.assert_allclose(mix_pdf(g, x, closed_form=False), gamma_pdf(GammaParams(4.0, 1.5), x),
                                   rtol=0, atol=1e-11)

    def test_sample_seeded(self):
        q = GammaMix([1.0, -2.0], 0.8, 1.0)
        np.testing.assert_array_equal(mix_sample(q, 100, 1), mix_sample(q, 100, 1))
        x = mix_sample(q, 20000, 2)
        ref = mix_cdf(q, np.sort(x))
        assert stats.kstest(x, lambda v: mix_cdf(q, v)).pvalue > 1e-3
        assert ref.shape == (20000,)
