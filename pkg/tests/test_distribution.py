"""Distribution tests: quadrature oracle, normalisation, sampler fidelity."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate
from scipy import stats as sps

from citesim.distribution import (
    InfeasibleMixtureError,
    LognormalParams,
    MixtureSpec,
    cdf,
    mixture_mean,
    pmf,
    rest_of_world_location,
    sample,
    sample_citations,
)
from citesim.experiment import DEFAULT_MU_VALUES, DEFAULT_P_VALUES
from helpers import chi_square_gof

STANDARD = LognormalParams(mu=1.0, sigma=1.0)


def density(x, mu, sigma):
    """Continuous lognormal density, written straight from its definition."""
    return math.exp(-((math.log(x) - mu) ** 2) / (2.0 * sigma**2)) / (
        x * sigma * math.sqrt(2.0 * math.pi)
    )


class TestPmf:
    @pytest.mark.parametrize("mu,sigma", [(1.0, 1.0), (0.9, 1.0), (2.0, 0.5), (0.0, 2.0)])
    def test_matches_quadrature_oracle(self, mu, sigma):
        params = LognormalParams(mu, sigma)
        denominator, _ = integrate.quad(density, 0.5, np.inf, args=(mu, sigma))
        for k in (1, 2, 3, 7, 40):
            mass, _ = integrate.quad(density, k - 0.5, k + 0.5, args=(mu, sigma))
            assert pmf(k, params) == pytest.approx(mass / denominator, abs=1e-10)

    def test_partial_sums_approach_one_from_below(self):
        ks = np.arange(1, 200_001)
        masses = pmf(ks, STANDARD)
        assert np.all(masses >= 0.0)
        assert np.all(masses[:1000] > 0.0)  # tail masses underflow to 0.0
        partial = np.cumsum(masses)
        assert partial[-1] <= 1.0
        assert partial[-1] > 0.9999

    def test_support_boundary(self):
        with pytest.raises(ValueError):
            pmf(0, STANDARD)
        with pytest.raises(ValueError):
            pmf(-3, STANDARD)
        with pytest.raises(ValueError):
            pmf(1.5, STANDARD)

    def test_vectorised_matches_scalar(self):
        ks = np.array([1, 2, 10])
        vec = pmf(ks, STANDARD)
        assert vec == pytest.approx([pmf(int(k), STANDARD) for k in ks], rel=1e-15)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            LognormalParams(mu=1.0, sigma=0.0)
        with pytest.raises(ValueError):
            LognormalParams(mu=math.inf, sigma=1.0)


class TestCdf:
    def test_telescopes_to_pmf(self):
        ks = np.arange(2, 200)
        diffs = cdf(ks, STANDARD) - cdf(ks - 1, STANDARD)
        assert diffs == pytest.approx(pmf(ks, STANDARD), abs=1e-12)

    def test_base_case(self):
        assert cdf(1, STANDARD) == pytest.approx(pmf(1, STANDARD), rel=1e-14)

    def test_tail_mass_is_negligible_at_one_million(self):
        value = cdf(10**6, STANDARD)
        assert value >= 0.9999
        assert abs(1.0 - value) < 1e-4

    def test_monotone(self):
        values = cdf(np.arange(1, 500), STANDARD)
        assert np.all(np.diff(values) > 0)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            cdf(0, STANDARD)


class TestSample:
    def test_zero_draws(self):
        rng = np.random.default_rng(0)
        assert sample(STANDARD, 0, rng).size == 0

    def test_support(self):
        rng = np.random.default_rng(1)
        draws = sample(STANDARD, 20_000, rng)
        assert draws.min() >= 1
        assert sample_citations(STANDARD, 100, rng).min() >= 0

    def test_negative_count_rejected(self):
        with pytest.raises(ValueError):
            sample(STANDARD, -1, np.random.default_rng(0))

    def test_reproducible(self):
        a = sample(STANDARD, 1000, np.random.default_rng(42))
        b = sample(STANDARD, 1000, np.random.default_rng(42))
        assert np.array_equal(a, b)

    def test_chi_square_goodness_of_fit(self):
        rng = np.random.default_rng(1234)
        draws = sample(STANDARD, 1_000_000, rng)
        stat, dof = chi_square_gof(draws, STANDARD)
        assert stat < sps.chi2.ppf(0.999, dof)

    @pytest.mark.parametrize("mu,sigma", [(0.9, 1.0), (1.1, 1.0)])
    def test_chi_square_other_parameters(self, mu, sigma):
        params = LognormalParams(mu, sigma)
        rng = np.random.default_rng(99)
        draws = sample(params, 200_000, rng)
        stat, dof = chi_square_gof(draws, params)
        assert stat < sps.chi2.ppf(0.999, dof)


class TestMixture:
    def test_identical_components_collapse(self):
        spec = MixtureSpec(mu_overall=1.0, sigma=1.0, mu1=1.0, mu2=1.0, p1=0.1, p2=0.3)
        assert mixture_mean(spec, 1.0) == pytest.approx(math.exp(1.5), rel=1e-14)

    def test_vanishing_shares_leave_rest_of_world(self):
        spec = MixtureSpec(mu_overall=1.0, sigma=1.0, mu1=3.0, mu2=-2.0, p1=1e-9, p2=1e-9)
        assert mixture_mean(spec, 0.7) == pytest.approx(math.exp(0.7 + 0.5), rel=1e-7)

    def test_round_trip_identity_single(self):
        spec = MixtureSpec(mu_overall=1.0, sigma=1.0, mu1=0.9, mu2=0.92, p1=0.05, p2=0.2)
        mu0 = rest_of_world_location(spec)
        assert abs(mixture_mean(spec, mu0) - math.exp(1.5)) < 1e-12

    def test_round_trip_identity_full_grid(self):
        target = math.exp(1.5)
        checked = 0
        for i, mu1 in enumerate(DEFAULT_MU_VALUES):
            for mu2 in DEFAULT_MU_VALUES[i + 1 :]:
                for p1 in DEFAULT_P_VALUES:
                    for p2 in DEFAULT_P_VALUES:
                        spec = MixtureSpec(1.0, 1.0, mu1, mu2, p1, p2)
                        mu0 = rest_of_world_location(spec)
                        assert abs(mixture_mean(spec, mu0) - target) < 1e-12
                        checked += 1
        assert checked == 1375

    def test_homogeneous_locations(self):
        spec = MixtureSpec(mu_overall=1.0, sigma=1.0, mu1=1.0, mu2=1.0, p1=0.25, p2=0.25)
        assert rest_of_world_location(spec) == pytest.approx(1.0, abs=1e-14)

    def test_worked_value(self):
        spec = MixtureSpec(mu_overall=1.0, sigma=1.0, mu1=1.1, mu2=1.1, p1=0.25, p2=0.25)
        expected = math.log((math.e - 0.5 * math.exp(1.1)) / 0.5)
        assert rest_of_world_location(spec) == pytest.approx(expected, rel=1e-14)

    def test_infeasible_mixture(self):
        spec = MixtureSpec(mu_overall=1.0, sigma=1.0, mu1=2.0, mu2=2.0, p1=0.5, p2=0.49)
        with pytest.raises(InfeasibleMixtureError):
            rest_of_world_location(spec)

    def test_share_validation(self):
        with pytest.raises(ValueError):
            MixtureSpec(1.0, 1.0, 0.9, 1.0, p1=0.6, p2=0.4)
        with pytest.raises(ValueError):
            MixtureSpec(1.0, 1.0, 0.9, 1.0, p1=0.0, p2=0.1)

    @given(
        mu_lo=st.floats(min_value=0.5, max_value=1.4),
        bump=st.floats(min_value=1e-3, max_value=0.5),
    )
    @settings(max_examples=50, deadline=None)
    def test_overall_mean_strictly_increases_with_location(self, mu_lo, bump):
        def solved_mean(mu_overall):
            spec = MixtureSpec(mu_overall, 1.0, 0.9, 0.95, 0.1, 0.1)
            return mixture_mean(spec, rest_of_world_location(spec))

        assert solved_mean(mu_lo + bump) > solved_mean(mu_lo)
