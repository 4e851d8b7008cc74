"""
Unit tests for the endpoint large-deviation calculus.
"""

import math

import numpy as np
import pytest

from fragmentation.limits import (
    AlphaOutOfRange,
    XOutOfRange,
    alpha_I,
    annealed_cdf_bound,
    annealed_rate,
    build_rate_profile,
    lambda_fn,
    lambda_prime,
    rate_I,
    rate_I0_and_xstar,
    solve_theta,
    theta_solution,
    tilde_g_cdf,
)
from fragmentation.models import AtomicMeasure, DegenerateMeasure

HALF_QUARTER_RATE = 0.25 * math.log(0.5) + 0.75 * math.log(1.5)


class TestLambda:
    """Test cases for lambda_fn and lambda_prime."""

    def test_zero_at_origin(self, two_point_measure):
        assert lambda_fn(two_point_measure, 0.0) == 0.0

    def test_atom_at_one(self):
        assert lambda_fn(AtomicMeasure.dirac(1.0), 3.5) == 3.5
        assert lambda_fn(AtomicMeasure.dirac(1.0), -2.0) == -2.0

    def test_half_point_mass(self):
        """Lambda(log 3) = log((1 + 3) / 2) for H = delta_{1/2}."""
        assert lambda_fn(AtomicMeasure.dirac(0.5), math.log(3.0)) == pytest.approx(math.log(2.0), abs=1e-15)

    def test_large_theta_does_not_overflow(self):
        assert lambda_fn(AtomicMeasure.dirac(0.5), 2000.0) == pytest.approx(2000.0 + math.log(0.5))

    def test_prime_at_origin_is_mean(self, two_point_measure):
        assert lambda_prime(two_point_measure, 0.0) == pytest.approx(0.5, abs=1e-15)

    def test_prime_far_left_is_mass_at_one(self):
        measure = AtomicMeasure.from_pairs([(0.3, 0.5), (1.0, 0.5)])
        assert lambda_prime(measure, -700.0) == pytest.approx(0.5, abs=1e-12)

    def test_prime_half_point_mass(self):
        assert lambda_prime(AtomicMeasure.dirac(0.5), -math.log(3.0)) == pytest.approx(0.25, abs=1e-15)

    def test_convexity(self):
        rng = np.random.default_rng(2024)
        for _ in range(500):
            size = int(rng.integers(1, 5))
            measure = AtomicMeasure.from_pairs(zip(rng.uniform(0.0, 1.0, size), rng.dirichlet(np.ones(size))))
            t1, t2 = rng.uniform(-30.0, 30.0, 2)
            lam = rng.uniform()
            mixed = lambda_fn(measure, lam * t1 + (1 - lam) * t2)
            assert mixed <= lam * lambda_fn(measure, t1) + (1 - lam) * lambda_fn(measure, t2) + 1e-12

    @pytest.mark.parametrize("theta", [-30.0, -4.0, 0.0, 2.5, 30.0])
    def test_prime_matches_finite_differences(self, theta):
        measure = AtomicMeasure.from_pairs([(0.2, 0.3), (0.7, 0.6), (1.0, 0.1)])
        h = 1e-4
        numeric = (lambda_fn(measure, theta + h) - lambda_fn(measure, theta - h)) / (2 * h)
        assert lambda_prime(measure, theta) == pytest.approx(numeric, rel=1e-6)


class TestSolveTheta:
    """Test cases for solve_theta and theta_solution."""

    def test_closed_form(self):
        """theta = log(alpha (1-p) / (p (1-alpha))) for a point mass."""
        assert solve_theta(AtomicMeasure.dirac(0.5), 0.25) == pytest.approx(math.log(1 / 3), abs=1e-9)

    def test_near_mean(self, two_point_measure):
        assert abs(solve_theta(two_point_measure, 0.5 - 1e-9)) <= 1e-6

    def test_two_point_residual(self, two_point_measure):
        solution = theta_solution(two_point_measure, 0.3)
        assert solution.residual <= 1e-12
        assert lambda_prime(two_point_measure, solution.theta) == pytest.approx(0.3, abs=1e-12)
        assert solution.iterations > 0

    def test_matches_grid_scan(self, two_point_measure):
        grid = np.linspace(-10.0, 10.0, 200001)
        values = np.array([lambda_prime(two_point_measure, t) for t in grid[::100]])
        bracket = grid[::100][np.searchsorted(values, 0.3)]
        assert abs(solve_theta(two_point_measure, 0.3) - bracket) <= 100 * (grid[1] - grid[0])

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.2])
    def test_out_of_range(self, alpha):
        with pytest.raises(AlphaOutOfRange):
            solve_theta(AtomicMeasure.dirac(0.5), alpha)

    def test_floor_from_mass_at_one(self):
        measure = AtomicMeasure.from_pairs([(0.3, 0.5), (1.0, 0.5)])
        with pytest.raises(AlphaOutOfRange):
            solve_theta(measure, 0.4)
        assert lambda_prime(measure, solve_theta(measure, 0.6)) == pytest.approx(0.6, abs=1e-12)

    def test_boundary_only_measure(self):
        with pytest.raises(DegenerateMeasure):
            solve_theta(AtomicMeasure.from_pairs([(0.0, 0.5), (1.0, 0.5)]), 0.5)


class TestRateFunction:
    """Test cases for rate_I and rate_I0_and_xstar."""

    def test_zero_at_mean(self, half_profile):
        assert rate_I(half_profile, 0.5) == pytest.approx(0.0, abs=1e-10)

    def test_half_quarter(self, half_profile):
        assert rate_I(half_profile, 0.25) == pytest.approx(HALF_QUARTER_RATE, abs=1e-10)

    def test_point_mass_is_kullback_leibler(self):
        profile = build_rate_profile(AtomicMeasure.dirac(0.3))
        for alpha in np.linspace(0.02, 0.28, 14):
            assert rate_I(profile, alpha) == pytest.approx(annealed_rate(0.3, alpha), abs=1e-10)

    def test_strictly_decreasing(self, two_point_measure):
        profile = build_rate_profile(two_point_measure)
        values = [rate_I(profile, alpha) for alpha in np.linspace(0.02, 0.48, 24)]
        assert np.all(np.diff(values) < 0)

    def test_xstar_point_mass(self):
        I0, x_star = rate_I0_and_xstar(AtomicMeasure.dirac(0.5))
        assert I0 == pytest.approx(math.log(2.0))
        assert x_star == pytest.approx(0.5)

    def test_xstar_atom_at_one(self):
        assert rate_I0_and_xstar(AtomicMeasure.dirac(1.0)) == (math.inf, 0.0)

    def test_xstar_uniform_midpoint(self):
        _, x_star = rate_I0_and_xstar(AtomicMeasure.uniform_midpoint(4096))
        assert x_star == pytest.approx(math.exp(-1.0), abs=5e-3)

    def test_xstar_below_one_minus_mean(self, two_point_measure):
        profile = build_rate_profile(two_point_measure)
        assert profile.x_star <= 1.0 - profile.p_bar + 1e-9

    def test_profile_floor(self):
        profile = build_rate_profile(AtomicMeasure.from_pairs([(0.5, 0.75), (1.0, 0.25)]))
        assert profile.alpha_lo == 0.25
        assert profile.x_star == 0.0
        assert profile.x_floor == pytest.approx(math.sqrt(0.5) ** 1.5)


class TestAlphaI:
    """Test cases for alpha_I and tilde_g_cdf."""

    def test_near_one(self, half_profile):
        assert abs(alpha_I(half_profile, 1.0 - 1e-9) - 0.5) <= 1e-4

    def test_at_one(self, half_profile):
        assert alpha_I(half_profile, 1.0) == 0.5

    def test_inverse_of_rate(self, half_profile):
        x = math.exp(-rate_I(half_profile, 0.25))
        assert alpha_I(half_profile, x) == pytest.approx(0.25, abs=1e-8)

    def test_rounded_argument(self, half_profile):
        assert alpha_I(half_profile, 0.87739) == pytest.approx(0.25, abs=1e-5)

    def test_just_above_xstar(self, half_profile):
        assert alpha_I(half_profile, half_profile.x_star + 1e-9) <= 1e-3

    @pytest.mark.parametrize("x", [0.4, 0.2, 1.2])
    def test_out_of_range(self, half_profile, x):
        with pytest.raises(XOutOfRange):
            alpha_I(half_profile, x)

    @pytest.mark.parametrize("alpha", [0.05, 0.15, 0.3, 0.45])
    def test_round_trip(self, two_point_measure, alpha):
        profile = build_rate_profile(two_point_measure)
        assert alpha_I(profile, math.exp(-rate_I(profile, alpha))) == pytest.approx(alpha, abs=1e-8)

    def test_round_trip_with_atom_at_one(self):
        profile = build_rate_profile(AtomicMeasure.from_pairs([(0.4, 0.8), (1.0, 0.2)]))
        for alpha in (0.25, 0.35, 0.5):
            assert alpha_I(profile, math.exp(-rate_I(profile, alpha))) == pytest.approx(alpha, abs=1e-8)
        assert alpha_I(profile, profile.x_floor) == 0.2

    def test_tilde_g_pieces(self, half_profile):
        assert tilde_g_cdf(half_profile, half_profile.x_star / 2) == 0.0
        assert tilde_g_cdf(half_profile, 1.0) == 1.0
        x = math.exp(-HALF_QUARTER_RATE)
        assert tilde_g_cdf(half_profile, x) == pytest.approx(0.25, abs=1e-8)

    def test_tilde_g_non_decreasing(self, two_point_measure):
        profile = build_rate_profile(two_point_measure)
        values = [tilde_g_cdf(profile, x) for x in np.linspace(0.0, 1.0, 41)]
        assert np.all(np.diff(values) >= 0)


class TestAnnealed:
    """Test cases for the annealed rate and envelope."""

    def test_rate_values(self):
        assert annealed_rate(0.3, 0.3) == 0.0
        assert annealed_rate(0.3, 0.0) == pytest.approx(-math.log(0.7))
        assert annealed_rate(0.5, 0.25) == pytest.approx(HALF_QUARTER_RATE, abs=1e-15)

    def test_rate_domain(self):
        with pytest.raises(AlphaOutOfRange):
            annealed_rate(0.5, 1.1)

    def test_bound_endpoints(self):
        assert annealed_cdf_bound(0.5, 0.5) == pytest.approx(0.0, abs=1e-6)
        assert annealed_cdf_bound(0.5, 1.0) == 1.0

    def test_bound_inverts_rate(self):
        x = math.exp(-annealed_rate(0.5, 0.25))
        assert annealed_cdf_bound(0.5, x) == pytest.approx(0.5, abs=1e-8)

    def test_bound_domain(self):
        with pytest.raises(XOutOfRange):
            annealed_cdf_bound(0.5, 0.4)
