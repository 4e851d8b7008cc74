"""
Unit tests for the fragmentation recursion.
"""

import math

import numpy as np
import pytest

from fragmentation.fragmenter import (
    EmptyPartition,
    RowLengthMismatch,
    count_below,
    evolve,
    evolve_log,
    longest_interval,
    measure_of,
    rate_estimate,
    refine,
    refine_log,
    reflect,
    transformed_cdf,
    upper_transformed_cdf,
)
from fragmentation.models import (
    EmpiricalQuery,
    IndexOutOfRange,
    InvalidProportion,
    LogPartition,
    Partition,
    SplittingRule,
)
from fragmentation.proportions import flip_environment, realize_environment


class TestRefine:
    """Test cases for a single refinement step."""

    def test_first_step(self):
        """One split of [0, 1] with p = 2/3 leaves a point at 1/3."""
        partition = refine(Partition.trivial(), [2 / 3])
        assert partition.points.tolist() == pytest.approx([1 / 3], abs=1e-16)

    def test_row_length_must_match(self):
        with pytest.raises(RowLengthMismatch):
            refine(Partition(np.array([0.5])), [0.5])

    def test_row_values_checked(self):
        with pytest.raises(InvalidProportion):
            refine(Partition.trivial(), [1.5])

    def test_refine_log_matches_linear(self):
        linear = refine(Partition(np.array([0.25, 0.6])), [0.3, 0.5, 0.9])
        logged = refine_log(LogPartition(np.log([0.25, 0.6])), [0.3, 0.5, 0.9])
        assert np.exp(logged.logpoints) == pytest.approx(linear.points, rel=1e-14)


class TestEvolve:
    """Test cases for evolve and evolve_log."""

    def test_worked_example(self, two_step_env):
        """Two steps of the table example give 1/6 and 5/9."""
        partition = evolve(two_step_env, 2)
        assert partition.points.tolist() == pytest.approx([1 / 6, 5 / 9], abs=1e-15)

    def test_constant_half(self, half_rule):
        partition = evolve(realize_environment(half_rule, 2), 2)
        assert partition.points.tolist() == [0.25, 0.75]

    def test_constant_zero_piles_up_at_one(self):
        partition = evolve(realize_environment(SplittingRule.constant(0.0), 3), 3)
        assert partition.points.tolist() == [1.0, 1.0, 1.0]

    def test_zero_steps(self, half_rule):
        assert evolve(realize_environment(half_rule, 1), 0).n == 0

    def test_too_many_steps(self, two_step_env):
        with pytest.raises(IndexOutOfRange):
            evolve(two_step_env, 3)

    def test_sorted_and_within_unit_interval(self, uniform_full_rule):
        partition = evolve(realize_environment(uniform_full_rule, 500, seed=8), 500)
        points = partition.points
        assert np.all(np.diff(points) >= 0)
        assert points[0] >= 0.0 and points[-1] <= 1.0
        assert partition.gaps().sum() == pytest.approx(1.0, abs=1e-12)

    def test_callback_sees_every_step(self, two_step_env):
        seen = []
        evolve(two_step_env, 2, callback=lambda m, points: seen.append((m, points.size)))
        assert seen == [(1, 1), (2, 2)]

    def test_log_domain_first_point(self, half_rule):
        """log a_{2000,1} = -2000 log 2 where the linear value underflows."""
        env = realize_environment(half_rule, 2000)
        log_partition = evolve_log(env, 2000)
        assert log_partition.logpoints[0] == pytest.approx(-2000 * math.log(2.0), rel=1e-12)
        assert evolve(env, 2000).points[0] == 0.0

    def test_log_domain_agrees_with_linear(self, uniform_strat_rule):
        env = realize_environment(uniform_strat_rule, 60, seed=4)
        linear = evolve(env, 60).points
        logged = np.exp(evolve_log(env, 60).logpoints)
        assert np.max(np.abs(linear - logged)) <= 1e-13


class TestQueries:
    """Test cases for empirical-measure queries."""

    def test_measure_of_closure(self):
        partition = Partition(np.array([0.25, 0.5, 0.75]))
        assert measure_of(partition, EmpiricalQuery.closed(0.25, 0.5)) == pytest.approx(2 / 3)
        assert measure_of(partition, EmpiricalQuery.half_open(0.25, 0.5)) == pytest.approx(1 / 3)
        assert measure_of(partition, EmpiricalQuery.closed(0.3, 0.4)) == 0.0

    def test_half_open_queries_are_additive(self):
        partition = Partition(np.array([0.1, 0.3, 0.3, 0.6, 0.9]))
        whole = measure_of(partition, EmpiricalQuery.half_open(0.0, 1.0))
        parts = measure_of(partition, EmpiricalQuery.half_open(0.0, 0.3)) + measure_of(
            partition, EmpiricalQuery.half_open(0.3, 1.0)
        )
        assert whole == pytest.approx(parts)

    def test_measure_of_trivial(self):
        with pytest.raises(EmptyPartition):
            measure_of(Partition.trivial(), EmpiricalQuery.closed(0.0, 1.0))

    def test_count_below(self):
        partition = Partition(np.array([0.25, 0.5, 0.5, 0.75]))
        assert count_below(partition, 0.5) == 1
        assert count_below(partition, 0.6) == 3

    def test_transformed_cdf(self, half_rule):
        """For p = 1/2 and n = 3 the points are 1/8, 1/2 and 7/8."""
        log_partition = evolve_log(realize_environment(half_rule, 3), 3)
        assert transformed_cdf(log_partition, 0.0) == 0.0
        assert transformed_cdf(log_partition, 1.0) == 1.0
        assert transformed_cdf(log_partition, 0.6) == pytest.approx(1 / 3)
        assert transformed_cdf(log_partition, 0.85) == pytest.approx(2 / 3)

    def test_upper_transformed_cdf_uses_flipped_points(self, two_step_env):
        flipped = evolve_log(flip_environment(two_step_env), 2)
        assert upper_transformed_cdf(two_step_env, 2, 0.9) == transformed_cdf(flipped, 0.9)

    def test_reflect_matches_flipped_environment(self, uniform_strat_rule):
        env = realize_environment(uniform_strat_rule, 40, seed=12)
        reflected = reflect(evolve(env, 40))
        flipped = evolve(flip_environment(env), 40)
        assert np.max(np.abs(reflected.points - flipped.points)) <= 1e-13

    def test_reflect_worked_example(self, two_step_env):
        """Mirrored points 4/9 and 5/6 are also what the flipped table produces."""
        assert reflect(evolve(two_step_env, 2)).points.tolist() == pytest.approx([4 / 9, 5 / 6], abs=1e-15)
        assert evolve(flip_environment(two_step_env), 2).points.tolist() == pytest.approx([4 / 9, 5 / 6], abs=1e-15)

    def test_reflect_fully_random(self, uniform_full_rule):
        env = realize_environment(uniform_full_rule, 30, seed=2)
        reflected = reflect(evolve(env, 30))
        flipped = evolve(flip_environment(env), 30)
        assert np.max(np.abs(reflected.points - flipped.points)) <= 1e-13

    def test_longest_interval(self, two_step_env):
        assert longest_interval(evolve(two_step_env, 2)) == pytest.approx(4 / 9, abs=1e-15)


class TestRateEstimate:
    """Test cases for rate_estimate."""

    def test_constant_half(self, half_rule):
        log_partition = evolve_log(realize_environment(half_rule, 100), 100)
        assert rate_estimate(log_partition, 0.01) == pytest.approx(math.log(2.0), rel=1e-12)

    @pytest.mark.parametrize("alpha", [0.0, 0.005, 1.5])
    def test_index_out_of_range(self, half_rule, alpha):
        log_partition = evolve_log(realize_environment(half_rule, 100), 100)
        with pytest.raises(IndexOutOfRange):
            rate_estimate(log_partition, alpha)
