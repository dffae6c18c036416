import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tracetails.errors import DegenerateDistributionError, NumericalError, PreconditionError
from tracetails.extremal import AbsFamily, RelFamily, TailRegion, abs_witness, in_qabs, rel_witness
from tracetails.gamma_core import GammaParams, gamma_inflection_points, gamma_mode, gamma_pdf
from tracetails.gamma_mix import GammaMix, mix_cdf
from tracetails.verify import (DominancePath, chain_paths, chebyshev_grid, conjecture_probe, dominance_check,
                               dominance_suite, inflection_extent, inflection_points, inflection_sup, interpolate,
                               mode_of, monotonicity_check, perturbed_density, perturbed_sum, proved_region)

R2 = math.sqrt(2)


def rel_path(mu, lam, **kw):
    return DominancePath.between(mu, lam, "relative", **kw)


def abs_path(mu, lam, **kw):
    return DominancePath.between(mu, lam, "absolute", **kw)


class TestPaths:
    def test_chebyshev_grid(self):
        t = chebyshev_grid()
        assert t.size == 33 and t[0] == 0.0 and t[-1] == 1.0 and np.all(np.diff(t) > 0)
        # clustered at the ends
        assert t[1] - t[0] < t[17] - t[16]

    def test_interpolate_examples(self):
        np.testing.assert_allclose(interpolate(rel_path([0.5, 0.5], [1, 0]), 0.5), [0.75, 0.25], rtol=1e-15)
        nu = interpolate(abs_path([1, -1], [R2, 0]), 0.5)
        np.testing.assert_allclose(nu, [math.sqrt(1.5), -math.sqrt(0.5)], rtol=1e-15)
        for p in (rel_path([0.5, 0.5], [1, 0]), abs_path([1, -1], [R2, 0])):
            assert np.array_equal(interpolate(p, 0.0), p.mu)
            assert np.array_equal(interpolate(p, 1.0), p.lam)
        with pytest.raises(PreconditionError):
            interpolate(rel_path([0.5, 0.5], [1, 0]), 1.5)

    def test_path_validation(self):
        with pytest.raises(PreconditionError):
            DominancePath([0.5, 0.5], [1, 0], 0, 0, "relative")
        with pytest.raises(PreconditionError):
            # not a smaller-to-larger transfer
            DominancePath([1, 0], [0.5, 0.5], 1, 0, "relative")
        with pytest.raises(PreconditionError):
            DominancePath([1, 1], [1.5, 0], 0, 1, "absolute")
        with pytest.raises(PreconditionError):
            rel_path([0.5, 0.3, 0.2], [0.2, 0.5, 0.3])
        with pytest.raises(PreconditionError):
            DominancePath([0.5, 0.5], [1, 0], 0, 1, "relative", t_grid=[0.2, 1])

    @settings(max_examples=30)
    @given(st.floats(0, 1), st.floats(0.01, 0.49), st.floats(0, 1))
    def test_relative_conserves_sum(self, t, d, frac):
        mu = np.array([0.5, 0.5 - d * frac, d * frac + 0.0])
        mu = np.array([0.4, 0.35, 0.25])
        lam = np.array([0.4 + 0.35 * frac * 0.5, 0.35 - 0.35 * frac * 0.5, 0.25])
        if frac == 0:
            return
        nu = interpolate(rel_path(mu, lam), t)
        assert abs(nu.sum() - 1.0) <= 1e-14

    @settings(max_examples=30)
    @given(st.floats(0, 1), st.floats(0.05, 0.95))
    def test_absolute_conserves_squares(self, t, frac):
        # one form-1 move on (1, -1): the negative coordinate shrinks toward zero
        k = -math.sqrt(1 - frac)
        p = abs_path([1, -1], [math.sqrt(1 + frac), k])
        nu = interpolate(p, t)
        assert abs(np.sum(nu * nu) - 2.0) <= 1e-14


class TestDensities:
    def test_relative_collapse(self):
        # weights (1, 1) with shape a and two unit-weight exponentials: Gamma(2a + 2, 1)
        p = rel_path([1, 1], [1, 1], shape=1.0)
        ref = GammaParams(4.0, 1.0)
        assert perturbed_density(p, 0.5, 3.0) == pytest.approx(gamma_pdf(ref, 3.0), abs=1e-7)
        g, _ = perturbed_sum(p, 0.5)
        assert mode_of(g, closed_form=False) == pytest.approx(gamma_mode(ref), abs=1e-7)

    def test_absolute_concave_centre(self):
        p = abs_path([1, -1], [1, -1])
        assert perturbed_density(p, 0.5, 0.0, 2) < 0

    def test_order_one_vanishes_at_mode(self):
        p = rel_path([0.5, 0.3, 0.2], [0.6, 0.2, 0.2])
        g, _ = perturbed_sum(p, 0.4)
        m = mode_of(g, closed_form=False)
        assert abs(perturbed_density(p, 0.4, m, 1)) <= 1e-6

    def test_degenerate(self):
        p = rel_path([1.0, 0.0, 0.0], [1.0, 0.0, 0.0])
        with pytest.raises(DegenerateDistributionError):
            perturbed_sum(DominancePath([1.0, 0.0, 0.0], [1.0, 0.0, 0.0], 1, 2, "relative"), 0.5)
        assert p.identical


class TestModes:
    def test_examples(self):
        assert mode_of(GammaMix([1], 2, 1)) == 1.0
        assert mode_of(GammaMix([1], 2, 1), closed_form=False) == pytest.approx(1.0, abs=1e-8)
        assert mode_of(GammaMix([1, -1], 1, 1), closed_form=False) == pytest.approx(0.0, abs=1e-8)
        _, pert = rel_witness(2.5, 1)
        assert mode_of(pert, closed_form=False) == pytest.approx(1 + 1 / 3, abs=1e-7)

    def test_degenerate(self):
        with pytest.raises(DegenerateDistributionError):
            mode_of(GammaMix([0.0, 0.0], 1, 1))

    @settings(max_examples=20)
    @given(st.floats(1.2, 30), st.floats(0.2, 5), st.floats(0.1, 3))
    def test_agrees_with_gamma_mode(self, a, b, w):
        # a Gamma(a, b) split into two equal halves, scaled by w
        g = GammaMix([w, w], a / 2, b)
        ref = w * gamma_mode(GammaParams(a, b))
        assert mode_of(g, closed_form=False) == pytest.approx(ref, abs=1e-7 * max(1.0, ref))


class TestInflections:
    def test_collapse_example(self):
        # Gamma(3, 1) after perturbation, centred by E[Y] = 1: extent 1 + sqrt 2
        p = abs_path([1, 1], [1, 1], shape=0.5)
        assert inflection_sup(p) == pytest.approx(1 + R2, abs=1e-6)
        g, shift = perturbed_sum(p, 0.3)
        assert inflection_extent(g, shift, closed_form=False) == pytest.approx(1 + R2, abs=1e-6)

    def test_symmetric(self):
        g, shift = perturbed_sum(abs_path([1, -1], [1, -1]), 0.5)
        lo, hi = inflection_points(g, shift, closed_form=False)
        assert hi == pytest.approx(-lo, abs=1e-6)

    def test_finer_grid_dominates(self):
        coarse = abs_path([1, 1], [R2, 0], t_grid=[0, 1])
        fine = abs_path([1, 1], [R2, 0], t_grid=[0, 0.5, 1])
        assert inflection_sup(fine) >= inflection_sup(coarse) - 1e-7

    def test_sup_on_form_two_path(self):
        # at t = 1 the law is sqrt 2 (X + psi + ...) with X ~ Exp: Gamma(2, 1/sqrt 2) plus shift
        p = abs_path([1, 1], [R2, 0])
        assert inflection_sup(p) == pytest.approx(1 + math.sqrt(3), abs=1e-6)

    def test_relative_kind_rejected(self):
        with pytest.raises(PreconditionError):
            inflection_sup(rel_path([0.5, 0.5], [1, 0]))

    @settings(max_examples=15)
    @given(st.floats(2.5, 30), st.floats(0.3, 4))
    def test_agrees_with_gamma_inflections(self, a, b):
        lo, hi = gamma_inflection_points(GammaParams(a, b))
        g = GammaMix([1.0, 1.0], a / 2, b)
        nlo, nhi = inflection_points(g, closed_form=False)
        assert nhi == pytest.approx(hi, abs=1e-6 * max(1.0, hi))
        assert nlo == pytest.approx(lo, abs=1e-6 * max(1.0, hi))

    def test_no_sign_change_reported(self):
        # an exponential is convex on its whole support; the failure is raised, not silent
        with pytest.raises((NumericalError, PreconditionError)):
            inflection_points(GammaMix([1.0, 1.0], 0.5, 1.0), closed_form=False)


class TestDominance:
    def test_relative_example(self):
        p = rel_path([0.5, 0.5], [1, 0])
        rep = dominance_check(p, TailRegion(None, 2.0))
        x, fa, fb = rep.grid[0]
        assert x == 2.0
        assert fa == pytest.approx(1 - 5 * math.exp(-4), abs=1e-12)
        assert fb == pytest.approx(1 - math.exp(-2), abs=1e-12)
        assert rep.passed and rep.margins[0] > 0

    def test_identical_endpoints(self):
        rep = dominance_check(rel_path([0.5, 0.5], [0.5, 0.5]))
        assert rep.passed and rep.worst_margin == 0.0
        rep = dominance_check(abs_path([1, -1], [1, -1]))
        assert rep.passed and rep.worst_margin == 0.0

    def test_report_json(self):
        rep = dominance_check(rel_path([0.5, 0.5], [1, 0], shape=2.0, rate=2.0), x_points=8)
        d = json.loads(rep.to_json())
        assert d["schema_version"] == 1
        assert {"claim", "region", "grid", "margins", "verdict", "provenance"} <= set(d)
        assert len(d["grid"]) == 16 and d["provenance"] == "proved"

    def test_proved_region_guard(self):
        p = rel_path([0.5, 0.5], [1, 0])
        with pytest.raises(PreconditionError):
            dominance_check(p, TailRegion(None, 1.2))
        rep = dominance_check(p, TailRegion(None, 1.2), provenance="conjectured")
        assert rep.provenance == "conjectured"

    def test_membership_guard(self):
        with pytest.raises(PreconditionError):
            dominance_check(rel_path([1.0, 1.0], [2.0, 0.0]))

    def test_absolute_region(self):
        p = abs_path([1, 1], [R2, 0])
        r = proved_region(p)
        assert r.symmetric and r.upper_edge == pytest.approx(1 + math.sqrt(3), abs=1e-6)
        assert dominance_check(p).passed

    def test_chain_steps_pass(self):
        mu = np.array([0.3, 0.3, 0.2, 0.2])
        lam = np.array([0.5, 0.3, 0.2, 0.0])
        paths = chain_paths(mu, lam, "relative", 1.0, 1.0)
        assert all(dominance_check(p).passed for p in paths)

    def test_suites(self):
        r = dominance_suite("relative", RelFamily(2.5), 2, 3, 1, x_points=16, t_points=9)
        assert r["verdict"] == "pass" and r["schema_version"] == 1 and r["grid"]["pairs"] == 3
        r = dominance_suite("absolute", AbsFamily(1, R2), 2, 1, 1, x_points=16, t_points=9)
        assert r["verdict"] == "pass"


class TestMonotonicity:
    def test_relative_upper_tail(self):
        p = rel_path([0.5, 0.5], [1, 0])
        r = monotonicity_check(p, 1 + 10 * 1.0)
        assert r["expected"] == "nonincreasing" and r["verdict"] == "pass"

    def test_relative_lower_tail(self):
        p = rel_path([0.5, 0.5], [1, 0])
        r = monotonicity_check(p, 0.01)
        assert r["expected"] == "nondecreasing" and r["verdict"] == "pass"

    def test_constant(self):
        r = monotonicity_check(rel_path([0.5, 0.5], [0.5, 0.5]), 1.3)
        assert r["expected"] == "constant" and r["verdict"] == "pass"

    def test_absolute_tails(self):
        p = abs_path([1, 1], [R2, 0])
        sd = R2
        up = monotonicity_check(p, 10 * sd)
        assert up["expected"] == "nonincreasing" and up["verdict"] == "pass"
        # F_mu >= F_lam holds in both tails, so F decreases in t below the
        # lower inflection as well
        lo = monotonicity_check(p, -10 * sd)
        assert lo["expected"] == "nonincreasing" and lo["verdict"] == "pass"


class TestProbes:
    def test_relative_witness(self):
        for alpha, mu in [(1, 2.5), (2, 5), (1, 1.01)]:
            r = conjecture_probe("relative", mu, alpha, 1, 0)
            c = math.ceil(mu / alpha)
            assert r["witness"]["value"] == pytest.approx(1 + 1 / (alpha * c), abs=1e-7)
            assert r["provenance"] == "conjectured" and "counterexamples" in r

    def test_relative_unconstrained(self):
        r = conjecture_probe("relative", 1.0, 1.0, 60, 4)
        assert r["empirical_max"] <= 1.5 + 1e-9
        assert r["empirical_max"] > 1.3

    def test_absolute_witness(self):
        f = AbsFamily(0.5, 2.0)
        q, pert, mean = abs_witness(f, 1.0)
        assert in_qabs(q, f)
        r = conjecture_probe("absolute", (0.5, 2.0), 1.0, 2, 0)
        assert r["witness"]["error"] <= 1e-6
        assert r["pessimistic"]["edge"] == pytest.approx(2 * (1 + math.sqrt(17)) / 4)

    def test_guards(self):
        with pytest.raises(PreconditionError):
            conjecture_probe("relative", 1.0, 1.0, 0, 0)
        with pytest.raises(PreconditionError):
            conjecture_probe("relative", 0.5, 1.0, 1, 0)
        with pytest.raises(PreconditionError):
            conjecture_probe("sideways", 1.0, 1.0, 1, 0)
