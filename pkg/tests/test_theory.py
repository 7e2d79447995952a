"""Closed forms against independent oracles: arbitrary-precision
arithmetic, density-equality checks, numerical quadrature, and finite
differences."""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize

from miadv import theory
from miadv.rng import derive_stream
from miadv.theory import TheoryInputs

mpmath.mp.dps = 40


def mp_sigma0_sq(n, p, D, sigma, q):
    n, p, D, sigma, q = map(mpmath.mpf, (n, p, D, sigma, q))
    return (n / p) * (1 / D + (1 + sigma**2 - p / D) / (p - n - 1)) * q


def mp_gen_error(n, p, D, sigma):
    n, p, D, sigma = map(mpmath.mpf, (n, p, D, sigma))
    return 1 + sigma**2 + n * ((1 + sigma**2 - p / D) / (p - n - 1) - 1 / D)


class TestVariances:
    def test_nonmember_frozen_value(self):
        inp = TheoryInputs(n=100, p=300, D=3000, sigma=1.0, norm_x0p_sq=300.0, norm_x0_sq=3000.0)
        want = float(mp_sigma0_sq(100, 300, 3000, 1, 300))
        assert math.isclose(theory.nonmember_variance(inp), want, rel_tol=1e-13)
        assert math.isclose(theory.nonmember_variance(inp), 0.988107, rel_tol=1e-6)

    def test_nonmember_zero_query(self):
        inp = TheoryInputs(n=100, p=300, D=3000, sigma=1.0, norm_x0p_sq=0.0, norm_x0_sq=100.0)
        assert theory.nonmember_variance(inp) == 0.0

    def test_nonmember_pole(self):
        inp = TheoryInputs(n=100, p=101, D=3000, sigma=1.0, norm_x0p_sq=1.0, norm_x0_sq=1.0)
        with pytest.raises(ValueError, match="pole"):
            theory.nonmember_variance(inp)

    def test_gamma_two_matches_member_variance(self):
        # far from the p/D correction the two arms coincide at ratio 2
        n, D = 1000, 10**7
        inp = theory.concentration_inputs(n, 2 * n, D, 1.0)
        s0 = theory.nonmember_variance(inp)
        s1 = theory.member_variance(inp)
        assert abs(s0 - s1) / s1 < 2e-3
        assert theory.advantage_point(s0, s1) < 1e-3

    def test_member_variance(self):
        assert theory.member_variance(TheoryInputs(10, 20, 50, 0.0, 0.0, 0.0)) == 0.0
        inp = TheoryInputs(10, 20, 50, 1.0, 10.0, 50.0)
        assert theory.member_variance(inp) == 2.0

    def test_member_variance_independent_of_p(self):
        vals = {
            theory.member_variance(TheoryInputs(10, p, 100, 0.5, float(p), 100.0))
            for p in (20, 40, 80)
        }
        assert len(vals) == 1

    def test_inputs_validation(self):
        with pytest.raises(ValueError, match="exceeds"):
            TheoryInputs(10, 20, 50, 1.0, 60.0, 50.0)
        with pytest.raises(ValueError, match="nonnegative"):
            TheoryInputs(10, 20, 50, 1.0, -1.0, 50.0)
        with pytest.raises(ValueError, match="p <= D"):
            TheoryInputs(10, 60, 50, 1.0, 1.0, 2.0)


class TestLrtThreshold:
    def test_frozen_value(self):
        # variances 1 and e: alpha = sqrt(e/(e-1))
        want = float(mpmath.sqrt(mpmath.e / (mpmath.e - 1)))
        assert math.isclose(theory.lrt_threshold(1.0, math.e), want, rel_tol=1e-14)
        assert math.isclose(theory.lrt_threshold(1.0, math.e), 1.25777, rel_tol=1e-5)

    def test_symmetric(self):
        assert theory.lrt_threshold(1.0, 4.0) == theory.lrt_threshold(4.0, 1.0)

    def test_density_equality_at_threshold(self):
        # the defining property: both zero-mean normal pdfs agree at alpha
        def pdf(x, var):
            return math.exp(-0.5 * x * x / var) / math.sqrt(2 * math.pi * var)

        for s0, s1 in [(1.0, 4.0), (0.3, 0.9), (2.0, 2.5)]:
            alpha = theory.lrt_threshold(s0, s1)
            assert abs(pdf(alpha, s0) - pdf(alpha, s1)) <= 1e-12

    def test_continuity_limit(self):
        # ratio 1 + 1e-9: threshold tends to the common deviation
        s0 = 2.0
        alpha = theory.lrt_threshold(s0, s0 * (1 + 1e-9))
        assert math.isclose(alpha, math.sqrt(s0), rel_tol=1e-9)

    def test_equal_variances_rejected(self):
        with pytest.raises(ValueError, match="equal variances"):
            theory.lrt_threshold(1.0, 1.0)


class TestAdvantagePoint:
    def test_equal_variances_zero(self):
        assert theory.advantage_point(2.0, 2.0) == 0.0

    def test_tiny_nonmember_variance_saturates(self):
        assert theory.advantage_point(1e-12, 2.0) > 0.999

    def test_quadrature_oracle(self):
        # independent oracle: find the density crossing numerically, then
        # integrate both densities by quadrature over the decision region
        s0, s1 = 1.0, 4.0

        def pdf(x, var):
            return math.exp(-0.5 * x * x / var) / math.sqrt(2 * math.pi * var)

        alpha = optimize.brentq(lambda x: pdf(x, s1) - pdf(x, s0), 1e-6, 10.0)
        tpr = 2 * integrate.quad(lambda x: pdf(x, s1), alpha, 40.0, limit=200)[0]
        fpr = 2 * integrate.quad(lambda x: pdf(x, s0), alpha, 40.0, limit=200)[0]
        assert math.isclose(theory.advantage_point(s0, s1), tpr - fpr, abs_tol=1e-8)

    @settings(max_examples=300, deadline=None)
    @given(
        a=st.floats(min_value=1e-6, max_value=1e6),
        b=st.floats(min_value=1e-6, max_value=1e6),
    )
    def test_symmetry_and_range(self, a, b):
        adv = theory.advantage_point(a, b)
        assert 0.0 <= adv <= 1.0
        assert adv == theory.advantage_point(b, a)

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError, match="positive"):
            theory.advantage_point(0.0, 1.0)
        with pytest.raises(ValueError, match="positive"):
            theory.advantage_point(1.0, -2.0)


class TestAdvantageCurves:
    def test_limit_zero_at_gamma_two(self):
        assert theory.min_norm_advantage_limit(2.0, 1.0) == 0.0
        assert theory.min_norm_advantage_limit(2.0, 0.5) == 0.0

    def test_limit_requires_overparameterization(self):
        with pytest.raises(ValueError, match="gamma > 1"):
            theory.min_norm_advantage_limit(1.0, 1.0)

    def test_monotone_in_gamma(self):
        n, D = 1000, 10**7
        up = [theory.min_norm_advantage_concentration(n, g * n, D, 1.0) for g in (3, 5, 10, 20, 50, 100)]
        down = [theory.min_norm_advantage_concentration(n, int(g * n), D, 1.0) for g in (1.1, 1.5, 2.0)]
        assert all(a < b for a, b in zip(up, up[1:]))
        assert all(a > b for a, b in zip(down, down[1:]))

    def test_monte_carlo_close_to_concentration(self):
        n, p, D = 1000, 10_000, 10**7
        est = theory.min_norm_advantage(n, p, D, 1.0, 200, derive_stream(5))
        conc = theory.min_norm_advantage_concentration(n, p, D, 1.0)
        assert abs(est.mean - conc) < 6 * max(est.stderr, 1e-4)
        assert len(est.per_x0) == 200
        assert math.isclose(est.mean, float(np.mean(est.per_x0)), rel_tol=1e-12)

    def test_curve_coupling_shares_queries(self):
        grid = [1500, 3000, 6000]
        a = theory.min_norm_advantage_curve(1000, 10**7, 1.0, grid, 50, derive_stream(8))
        b = theory.min_norm_advantage_curve(1000, 10**7, 1.0, grid, 50, derive_stream(8))
        assert [e.per_x0 for e in a] == [e.per_x0 for e in b]


class TestQueryNormTable:
    def test_moments_and_coupling(self):
        table = theory.query_norm_table(derive_stream(21), [100, 400], 1000, 20_000)
        q100, r100 = table[100]
        q400, r400 = table[400]
        assert abs(q100.mean() - 100) < 4 * math.sqrt(2 * 100 / 20_000)
        assert abs(q400.mean() - 400) < 4 * math.sqrt(2 * 400 / 20_000)
        assert np.all(q400 >= q100)  # same queries: prefix norms grow with p
        np.testing.assert_array_equal(r100, r400)
        assert abs(r100.mean() - 1000) < 4 * math.sqrt(2 * 1000 / 20_000)

    def test_validation(self):
        with pytest.raises(ValueError, match="lie in"):
            theory.query_norm_table(derive_stream(0), [2000], 1000, 10)
        with pytest.raises(ValueError, match="count"):
            theory.query_norm_table(derive_stream(0), [10], 1000, 0)


class TestStieltjes:
    def test_frozen_value(self):
        # ratio 2, penalty 1: the quadratic has no linear term, g = sqrt(8)/4
        st_val = theory.mp_stieltjes(2.0, 1.0)
        assert math.isclose(st_val.g, math.sqrt(8) / 4, rel_tol=1e-14)

    def test_decay_for_large_penalty(self):
        assert theory.mp_stieltjes(2.0, 1e8).g < 2e-8

    def test_quadratic_residual_across_grid(self):
        for gamma in np.geomspace(1.1, 100, 17):
            for lam in np.geomspace(1e-4, 10, 13):
                st_val = theory.mp_stieltjes(float(gamma), float(lam))
                assert st_val.scaled_residual() <= 1e-12
                assert st_val.g > 0 and st_val.g_prime > 0

    def test_derivative_matches_finite_differences(self):
        # relative step: g curves like 1/lambda^2 near 0, so a fixed step
        # loses accuracy at the small-lambda end of the grid
        for gamma in np.geomspace(1.1, 100, 9):
            for lam in np.geomspace(1e-4, 10, 9):
                gamma, lam = float(gamma), float(lam)
                h = 1e-6 * lam
                fd = (theory.mp_stieltjes(gamma, lam - h).g - theory.mp_stieltjes(gamma, lam + h).g) / (2 * h)
                an = theory.mp_stieltjes(gamma, lam).g_prime
                assert abs(fd - an) / an <= 1e-5

    def test_example_point_fixed_step(self):
        h = 1e-6
        fd = (theory.mp_stieltjes(2.0, 1.0 - h).g - theory.mp_stieltjes(2.0, 1.0 + h).g) / (2 * h)
        assert abs(fd - theory.mp_stieltjes(2.0, 1.0).g_prime) / fd <= 1e-5

    def test_zero_penalty_rejected(self):
        with pytest.raises(ValueError, match="min-norm"):
            theory.mp_stieltjes(2.0, 0.0)


class TestRidgeVariances:
    def test_small_penalty_recovers_min_norm(self):
        n, D, sigma = 1000, 10**7, 1.0
        for gamma in (2, 10, 50):
            p = gamma * n
            inp = theory.concentration_inputs(n, p, D, sigma)
            s0, s1 = theory.nonmember_variance(inp), theory.member_variance(inp)
            vp = theory.ridge_variances(n, p, D, sigma, 1e-8, float(p), float(D))
            assert abs(vp.sigma0_sq - s0) / s0 <= 1e-3
            assert abs(vp.sigma1_sq - s1) / s1 <= 1e-3

    def test_zero_query_point(self):
        # every term of both displayed variances carries the prefix norm,
        # and the prediction at a zero query is identically zero
        vp = theory.ridge_variances(100, 1000, 10**6, 1.0, 0.5, 0.0, 0.0)
        assert vp.sigma0_sq == 0.0
        assert vp.sigma1_sq == 0.0

    def test_penalty_increases_advantage(self):
        n, D = 1000, 10**7
        lo = theory.ridge_advantage_concentration(n, 10 * n, D, 1.0, 0.001)
        hi = theory.ridge_advantage_concentration(n, 10 * n, D, 1.0, 0.1)
        assert hi > lo

    def test_monotone_in_penalty_both_ratios(self):
        n, D = 1000, 10**7
        for gamma in (10, 50):
            advs = [
                theory.ridge_advantage_concentration(n, gamma * n, D, 1.0, lam)
                for lam in (1e-3, 1e-2, 1e-1, 1.0)
            ]
            assert all(b >= a for a, b in zip(advs, advs[1:]))

    def test_nonpositive_penalty_rejected(self):
        with pytest.raises(ValueError, match="lambda"):
            theory.ridge_variances(100, 1000, 10**6, 1.0, 0.0, 1000.0, 10**6)


class TestGeneralizationError:
    def test_frozen_value(self):
        got = theory.generalization_error(100, 300, 3000, 1.0)
        want = float(mp_gen_error(100, 300, 3000, 1))
        assert math.isclose(got, want, rel_tol=1e-13)
        assert math.isclose(got, 2.92144, rel_tol=1e-6)

    def test_full_feature_form(self):
        # at p = D the error reduces to 1 + s^2 + n*(s^2/(D-n-1) - 1/D)
        n, D, sigma = 100, 3000, 1.0
        want = 1 + sigma**2 + n * (sigma**2 / (D - n - 1) - 1 / D)
        assert math.isclose(theory.generalization_error(n, D, D, sigma), want, rel_tol=1e-14)

    def test_pole(self):
        with pytest.raises(ValueError, match="pole"):
            theory.generalization_error(100, 101, 3000, 1.0)

    @settings(max_examples=150, deadline=None)
    @given(data=st.data())
    def test_identity_with_concentration_variance(self, data):
        # gen error == 1 + sigma^2 + E[nonmember variance] - 2n/D with the
        # expectation taken at the concentration norms
        n = data.draw(st.integers(min_value=2, max_value=500))
        p = data.draw(st.integers(min_value=n + 2, max_value=4 * n + 10))
        D = data.draw(st.integers(min_value=p, max_value=50 * p))
        sigma = data.draw(st.floats(min_value=0.0, max_value=4.0))
        gen = theory.generalization_error(n, p, D, sigma)
        s0 = theory.nonmember_variance(theory.concentration_inputs(n, p, D, sigma))
        alt = 1 + sigma**2 + s0 - 2 * n / D
        assert math.isclose(gen, alt, rel_tol=1e-12, abs_tol=1e-12)


class TestTradeoffCurves:
    def test_noise_cancels_advantage(self):
        n, D, sigma = 100, 3000, 1.0
        inp = theory.concentration_inputs(n, D, D, sigma)
        gap = theory.member_variance(inp) - theory.nonmember_variance(inp)
        pts = theory.noise_addition_curve(n, D, sigma, [gap])
        assert pts[0].advantage == 0.0

    def test_zero_noise_equals_full_feature_point(self):
        n, D, sigma = 100, 3000, 1.0
        na = theory.noise_addition_curve(n, D, sigma, [0.0])[0]
        fr = theory.feature_reduction_curve(n, D, sigma, [D])[0]
        assert math.isclose(na.advantage, fr.advantage, rel_tol=1e-14)
        assert math.isclose(na.gen_error, fr.gen_error, rel_tol=1e-14)

    def test_noise_shifts_gen_error_exactly(self):
        n, D, sigma = 100, 3000, 1.0
        pts = theory.noise_addition_curve(n, D, sigma, [0.0, 0.25, 1.5])
        assert math.isclose(pts[1].gen_error - pts[0].gen_error, 0.25, rel_tol=1e-12)
        assert math.isclose(pts[2].gen_error - pts[0].gen_error, 1.5, rel_tol=1e-12)

    def test_equivalence_at_matched_gen_error(self):
        n, D, sigma = 100, 3000, 1.0
        p_grid = sorted(set(int(p) for p in np.geomspace(140, D, 20)))
        fr = theory.feature_reduction_curve(n, D, sigma, p_grid)
        base = theory.generalization_error(n, D, D, sigma)
        na = theory.noise_addition_curve(n, D, sigma, [pt.gen_error - base for pt in fr])
        for a, b in zip(fr, na):
            assert math.isclose(a.gen_error, b.gen_error, rel_tol=1e-12)
            assert abs(a.advantage - b.advantage) <= 0.02

    def test_feature_reduction_pole_validated(self):
        with pytest.raises(ValueError, match="n\\+1 < p"):
            theory.feature_reduction_curve(100, 3000, 1.0, [100])

    def test_gen_error_maximal_near_pole(self):
        pts = theory.feature_reduction_curve(100, 3000, 1.0, [105, 300, 3000])
        assert pts[0].gen_error == max(pt.gen_error for pt in pts)
