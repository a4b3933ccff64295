import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from jointaug.distributions import (JcDistribution, RatioBounds,
                                    randomcrop_ratio_cdf, randomcrop_ratio_pdf,
                                    tail_probability, truncated_normal_pdf,
                                    truncated_normal_sample)

LN5 = math.log(5.0)
BOUNDS = RatioBounds(0.2, 1.0)
BETAS = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0]


# Independent oracle pieces: plain math.erf, no scipy, no package code.

def phi_oracle(x):
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def normal_pdf_oracle(x):
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def quad(f, a, b, n=20000):
    xs = np.linspace(a, b, n + 1)
    ys = np.array([f(x) for x in xs])
    return float(np.trapezoid(ys, xs))


class TestRatioBounds:
    def test_log_span(self):
        assert BOUNDS.log_span == pytest.approx(LN5, abs=1e-15)

    @pytest.mark.parametrize("lo,hi", [(0.0, 1.0), (-0.1, 1.0), (1.0, 1.0), (2.0, 1.0)])
    def test_rejects_bad_bounds(self, lo, hi):
        with pytest.raises(ValueError):
            RatioBounds(lo, hi)


class TestTruncatedNormal:
    def test_symmetric_median(self):
        assert truncated_normal_sample(0.0, 1.0, -1.0, 1.0, 0.5) == pytest.approx(0.0, abs=1e-12)

    def test_lower_truncation_limit(self):
        x = truncated_normal_sample(0.0, 0.8047, -LN5, LN5, 1e-12)
        assert -LN5 <= x < -LN5 + 1e-3

    def test_density_at_zero_vs_erf_oracle(self):
        sigma = LN5 / 2.0
        # oracle: phi(0)/sigma renormalized to the truncated mass
        mass = phi_oracle(2.0) - phi_oracle(-2.0)
        expected = normal_pdf_oracle(0.0) / sigma / mass
        assert expected == pytest.approx(0.5194, abs=1e-3)
        assert truncated_normal_pdf(0.0, 0.0, sigma, -LN5, LN5) == pytest.approx(expected, abs=1e-12)

    def test_pdf_normalizes(self):
        sigma = LN5 / 2.0
        total = quad(lambda x: truncated_normal_pdf(x, 0.0, sigma, -LN5, LN5), -LN5, LN5)
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_sample_matches_cdf_inversion_oracle(self):
        # invert the oracle CDF by bisection and compare
        sigma, lo, hi = 0.7, -1.2, 2.0
        p_lo, p_hi = phi_oracle(lo / sigma), phi_oracle(hi / sigma)
        for u in (0.05, 0.3, 0.5, 0.77, 0.99):
            target = p_lo + u * (p_hi - p_lo)
            a, b = lo, hi
            for _ in range(80):
                mid = 0.5 * (a + b)
                if phi_oracle(mid / sigma) < target:
                    a = mid
                else:
                    b = mid
            assert truncated_normal_sample(0.0, sigma, lo, hi, u) == pytest.approx(0.5 * (a + b), abs=1e-9)

    @pytest.mark.parametrize("kwargs", [
        dict(mu=float("nan"), sigma=1.0, lo=-1.0, hi=1.0, u=0.5),
        dict(mu=0.0, sigma=0.0, lo=-1.0, hi=1.0, u=0.5),
        dict(mu=0.0, sigma=-1.0, lo=-1.0, hi=1.0, u=0.5),
        dict(mu=0.0, sigma=1.0, lo=1.0, hi=1.0, u=0.5),
        dict(mu=0.0, sigma=1.0, lo=-1.0, hi=1.0, u=0.0),
        dict(mu=0.0, sigma=1.0, lo=-1.0, hi=1.0, u=1.0),
    ])
    def test_parameter_errors(self, kwargs):
        with pytest.raises(ValueError):
            truncated_normal_sample(**kwargs)


class TestJcDistribution:
    def test_uniform_midpoint(self):
        d = JcDistribution(0.0, BOUNDS)
        assert d.sample(0.5) == pytest.approx(0.0, abs=1e-15)

    def test_flip_rule(self):
        # beta<0 post-processes the |beta| draw: y<0 -> -sb-y, y>=0 -> sb-y
        sb = BOUNDS.log_span
        pos = JcDistribution(1.0, BOUNDS)
        neg = JcDistribution(-1.0, BOUNDS)
        for u in np.linspace(0.01, 0.99, 37):
            y = pos.sample(float(u))
            expected = -sb - y if y < 0 else sb - y
            assert neg.sample(float(u)) == pytest.approx(expected, abs=1e-12)

    def test_flip_example_value(self):
        # intermediate draw y = -0.4*sb maps to -0.6*sb
        sb = BOUNDS.log_span
        y = -0.4 * sb
        assert (-sb - y) == pytest.approx(-0.6 * sb, abs=1e-12)

    def test_uniform_mean_monte_carlo(self):
        d = JcDistribution(0.0, BOUNDS)
        rng = np.random.default_rng(1)
        x = d.sample(rng.random(10**6).clip(1e-12, 1 - 1e-12))
        # 3-sigma bound for the mean of U[-sb, sb]
        tol = 3.0 * (BOUNDS.log_span / math.sqrt(3.0)) / math.sqrt(10**6)
        assert abs(x.mean()) < tol

    def test_uniform_density_value(self):
        d = JcDistribution(0.0, BOUNDS)
        assert d.pdf(0.0) == pytest.approx(1.0 / (2.0 * LN5), abs=1e-12)

    def test_outside_support_is_zero(self):
        d = JcDistribution(2.0, BOUNDS)
        assert d.pdf(LN5 + 0.1) == 0.0
        assert d.pdf(-LN5 - 0.1) == 0.0

    def test_negative_beta_moves_mass_to_edges(self):
        lo = JcDistribution(-2.0, BOUNDS).pdf(0.0)
        hi = JcDistribution(2.0, BOUNDS).pdf(0.0)
        assert lo < hi
        # quadrature oracle: central mass smaller for beta=-2
        mid_neg = quad(JcDistribution(-2.0, BOUNDS).pdf, -0.5, 0.5)
        mid_pos = quad(JcDistribution(2.0, BOUNDS).pdf, -0.5, 0.5)
        assert mid_neg < mid_pos

    @pytest.mark.parametrize("beta", BETAS)
    def test_pdf_normalizes(self, beta):
        d = JcDistribution(beta, BOUNDS)
        sb = BOUNDS.log_span
        # split at 0: the beta<0 density has a kink there
        total = quad(d.pdf, -sb, 0.0) + quad(d.pdf, 0.0, sb)
        assert total == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("beta", BETAS)
    def test_pdf_symmetry(self, beta):
        d = JcDistribution(beta, BOUNDS)
        for x in np.linspace(0.0, BOUNDS.log_span, 50):
            assert d.pdf(float(x)) == pytest.approx(d.pdf(float(-x)), rel=1e-12)

    @pytest.mark.parametrize("beta", BETAS)
    def test_cdf_consistent_with_pdf(self, beta):
        d = JcDistribution(beta, BOUNDS)
        for a, b in [(-1.5, -0.2), (-0.4, 0.7), (0.1, 1.4)]:
            mass = quad(d.pdf, a, 0.0) + quad(d.pdf, 0.0, b) if a < 0 < b else quad(d.pdf, a, b)
            assert d.cdf(b) - d.cdf(a) == pytest.approx(mass, abs=1e-6)

    @pytest.mark.parametrize("beta", BETAS)
    def test_samples_within_support(self, beta):
        d = JcDistribution(beta, BOUNDS)
        rng = np.random.default_rng(2)
        x = d.sample(rng.random(10**6).clip(1e-12, 1 - 1e-12))
        sb = BOUNDS.log_span
        assert np.all(x >= -sb) and np.all(x <= sb)
        se = x.std(ddof=1) / math.sqrt(len(x))
        assert abs(x.mean()) < 3.5 * se

    def test_moment_monotone_in_beta(self):
        # E|x| shrinks as beta grows ("shorter and fatter" as beta decreases)
        sb = BOUNDS.log_span
        means = []
        for beta in (-2.0, -1.0, 0.0, 1.0, 2.0):
            d = JcDistribution(beta, BOUNDS)
            means.append(quad(lambda x: abs(x) * d.pdf(x), -sb, 0.0)
                         + quad(lambda x: abs(x) * d.pdf(x), 0.0, sb))
        assert all(a > b for a, b in zip(means, means[1:]))

    def test_tiny_beta_is_uniform_limit(self):
        d = JcDistribution(1e-6, BOUNDS)
        sb = BOUNDS.log_span
        xs = np.linspace(-sb, sb, 4001)
        uniform_cdf = (xs + sb) / (2.0 * sb)
        ks = np.max(np.abs(d.cdf(xs) - uniform_cdf))
        assert ks < 1e-4

    @given(st.floats(min_value=-1.9, max_value=1.9),
           st.floats(min_value=1e-6, max_value=1.0 - 1e-6))
    def test_sample_always_in_support_property(self, beta, u):
        d = JcDistribution(beta, BOUNDS)
        x = d.sample(u)
        assert -BOUNDS.log_span <= x <= BOUNDS.log_span


class TestRandomcropRatio:
    def test_pdf_at_one(self):
        assert randomcrop_ratio_pdf(1.0, BOUNDS) == pytest.approx(0.75, abs=1e-12)

    def test_pdf_vanishes_at_support_edges(self):
        assert randomcrop_ratio_pdf(0.2, BOUNDS) == pytest.approx(0.0, abs=1e-12)
        assert randomcrop_ratio_pdf(5.0, BOUNDS) == pytest.approx(0.0, abs=1e-12)
        assert randomcrop_ratio_pdf(0.1, BOUNDS) == 0.0
        assert randomcrop_ratio_pdf(6.0, BOUNDS) == 0.0

    def test_pdf_continuous_at_one(self):
        eps = 1e-10
        assert randomcrop_ratio_pdf(1.0 - eps, BOUNDS) == pytest.approx(
            randomcrop_ratio_pdf(1.0 + eps, BOUNDS), abs=1e-6)

    def test_cdf_values(self):
        assert randomcrop_ratio_cdf(1.0, BOUNDS) == pytest.approx(0.5, abs=1e-12)
        assert randomcrop_ratio_cdf(0.2, BOUNDS) == pytest.approx(0.0, abs=1e-12)
        assert randomcrop_ratio_cdf(5.0, BOUNDS) == pytest.approx(1.0, abs=1e-12)
        # integral of the closed-form pdf on (2, 5] is 9/64
        assert randomcrop_ratio_cdf(2.0, BOUNDS) == pytest.approx(1.0 - 9.0 / 64.0, abs=1e-12)

    def test_cdf_matches_pdf_quadrature(self):
        for x in (0.3, 0.8, 1.7, 3.5):
            mass = quad(lambda t: randomcrop_ratio_pdf(t, BOUNDS), 0.2, x)
            assert randomcrop_ratio_cdf(x, BOUNDS) == pytest.approx(mass, abs=1e-6)

    def test_cdf_nondecreasing(self):
        xs = np.linspace(0.15, 5.1, 1000)
        cs = randomcrop_ratio_cdf(xs, BOUNDS)
        assert np.all(np.diff(cs) >= -1e-15)

    def test_monte_carlo_cross_check(self):
        rng = np.random.default_rng(3)
        s1 = rng.uniform(0.2, 1.0, 10**6)
        s2 = rng.uniform(0.2, 1.0, 10**6)
        ratio = np.sort(s2 / s1)
        ecdf = np.arange(1, len(ratio) + 1) / len(ratio)
        ks = np.max(np.abs(ecdf - randomcrop_ratio_cdf(ratio, BOUNDS)))
        assert ks < 0.002

    def test_tail_probability(self):
        assert tail_probability(2.0, BOUNDS) == pytest.approx(0.28125, abs=1e-12)
        assert tail_probability(5.0, BOUNDS) == pytest.approx(0.0, abs=1e-12)
        assert tail_probability(1.0 + 1e-9, BOUNDS) == pytest.approx(1.0, abs=1e-6)

    def test_tail_monte_carlo(self):
        rng = np.random.default_rng(4)
        s1 = rng.uniform(0.2, 1.0, 10**6)
        s2 = rng.uniform(0.2, 1.0, 10**6)
        r = s2 / s1
        emp = np.mean((r >= 2.0) | (r <= 0.5))
        assert emp == pytest.approx(0.28125, abs=0.002)

    def test_tail_rejects_t_below_one(self):
        with pytest.raises(ValueError):
            tail_probability(1.0, BOUNDS)
        with pytest.raises(ValueError):
            tail_probability(0.5, BOUNDS)
