"""
Finite-n diagnostics comparing realized partitions with their limits.

Every function returns a pandas DataFrame whose columns are the CSV contract
of the matching command.
"""

import logging
import math
from typing import Iterable, Sequence, Tuple

import numpy as np
import pandas as pd

from ..fragmenter import evolve_log, longest_interval, measure_of, rate_estimate, transformed_cdf
from ..models import (
    BulkScaling,
    EmpiricalQuery,
    Environment,
    FragmentationError,
    LogPartition,
    Partition,
    RateProfile,
    RuleKind,
    SplittingRule,
)
from ..proportions import (
    NotStratified,
    realize_environment,
    step_mean_param,
    step_variance_param,
)
from .normal import normal_quantile
from .rate_function import (
    AlphaOutOfRange,
    annealed_cdf_bound,
    annealed_rate,
    rate_I,
    solve_theta,
    tilde_g_cdf,
)

logger = logging.getLogger(__name__)

BULK_COLUMNS = ["x", "y", "scaled_mass", "limit", "abs_err"]
ENDPOINT_COLUMNS = ["x", "empirical", "limit", "abs_err"]
ANNEALED_ENDPOINT_COLUMNS = ["x", "empirical", "annealed_bound"]
RATE_COLUMNS = ["alpha", "theta", "I"]
WEAK_LIMIT_COLUMNS = ["x", "mass", "limit", "abs_err", "hoeffding_bound"]
QUENCHED_COLUMNS = ["alpha", "I_hat", "stderr", "I_annealed"]


class BadGrid(FragmentationError):
    """A query grid contains points outside the allowed domain."""


def make_bulk_scaling(rule: SplittingRule, n: int) -> BulkScaling:
    """
    Centering and spread of the bulk limit for a rule.

    m_n is the sum of the proportions for deterministic rules and n * p_bar
    for random ones; sigma_n^2 is the step variance parameter.
    """
    return BulkScaling(
        m_n=step_mean_param(rule, n),
        sigma_n=math.sqrt(step_variance_param(rule, n)),
    )


def make_realized_bulk_scaling(env: Environment, n: int) -> BulkScaling:
    """
    Quenched scaling read off a realized stratified environment:
    m_n = sum P_m and sigma_n^2 = sum P_m (1 - P_m).
    """
    if env.rule.kind is RuleKind.FULLY_RANDOM:
        return make_bulk_scaling(env.rule, n)
    if env.rule.kind is RuleKind.TABLE:
        raise NotStratified("Realized bulk scaling needs a stratified environment")
    values = np.asarray(env.step_values[:n])
    if env.flipped:
        values = 1.0 - values
    return BulkScaling(
        m_n=float(values.sum()),
        sigma_n=math.sqrt(float(np.sum(values * (1.0 - values)))),
    )


def _check_pairs(grid: Iterable[Tuple[float, float]]):
    pairs = [(float(x), float(y)) for x, y in grid]
    if not pairs:
        raise BadGrid("Grid is empty")
    for x, y in pairs:
        if not (0.0 < x <= y < 1.0):
            raise BadGrid(f"Grid pair ({x!r}, {y!r}) must satisfy 0 < x <= y < 1")
    return pairs


def _check_points(xs: Iterable[float]):
    points = [float(x) for x in xs]
    if not points:
        raise BadGrid("Grid is empty")
    for x in points:
        if not 0.0 < x < 1.0:
            raise BadGrid(f"Grid point {x!r} must lie in (0, 1)")
    return points


def bulk_deviation(
    partition: Partition,
    scaling: BulkScaling,
    grid: Iterable[Tuple[float, float]],
    left_closed: bool = True,
    right_closed: bool = True,
) -> pd.DataFrame:
    """
    Scaled bulk mass n g_n([x, y]) / sigma_n against Q(y) - Q(x).

    Args:
        partition: Realized partition P_n
        scaling: Bulk scaling for the same n
        grid: Pairs (x, y) with 0 < x <= y < 1
        left_closed, right_closed: Endpoint closure of every query

    Returns:
        DataFrame with columns x, y, scaled_mass, limit, abs_err
    """
    rows = []
    for x, y in _check_pairs(grid):
        query = EmpiricalQuery(x, y, left_closed, right_closed)
        scaled = partition.n * measure_of(partition, query) / scaling.sigma_n
        limit = normal_quantile(y) - normal_quantile(x) if y > x else 0.0
        rows.append((x, y, scaled, limit, abs(scaled - limit)))
    return pd.DataFrame(rows, columns=BULK_COLUMNS)


def mesh_scaling(partition: Partition, scaling: BulkScaling) -> float:
    """sigma_n times the longest interval; stays bounded when the mesh is O(1/sigma_n)."""
    return scaling.sigma_n * longest_interval(partition)


def hoeffding_bound(n: int, delta: float) -> float:
    """epsilon with 2 exp(-2 n epsilon^2) = delta."""
    if n < 1 or not 0.0 < delta < 2.0:
        raise BadGrid(f"Hoeffding bound needs n >= 1 and 0 < delta < 2 (got n={n}, delta={delta!r})")
    return math.sqrt(math.log(2.0 / delta) / (2.0 * n))


def weak_limit_deviation(partition: Partition, center: float, xs: Iterable[float]) -> pd.DataFrame:
    """
    g_n([0, x]) against the weak limit p_bar delta_0 + (1 - p_bar) delta_1.

    ``hoeffding_bound`` is the tolerance epsilon + 1/n with
    delta = min(x, 1 - x); it applies when ``center`` is m_n / n.
    """
    n = partition.n
    rows = []
    for x in _check_points(xs):
        mass = measure_of(partition, EmpiricalQuery.closed(0.0, x))
        tolerance = hoeffding_bound(n, min(x, 1.0 - x)) + 1.0 / n
        rows.append((x, mass, center, abs(mass - center), tolerance))
    return pd.DataFrame(rows, columns=WEAK_LIMIT_COLUMNS)


def endpoint_deviation(
    log_partition: LogPartition, profile: RateProfile, xs: Iterable[float]
) -> pd.DataFrame:
    """
    Transformed empirical CDF against tilde_g([0, x]).

    Returns:
        DataFrame with columns x, empirical, limit, abs_err
    """
    rows = []
    for x in _check_points(xs):
        empirical = transformed_cdf(log_partition, x)
        limit = tilde_g_cdf(profile, x)
        rows.append((x, empirical, limit, abs(empirical - limit)))
    return pd.DataFrame(rows, columns=ENDPOINT_COLUMNS)


def annealed_endpoint_table(
    log_partition: LogPartition, p_bar: float, xs: Iterable[float]
) -> pd.DataFrame:
    """
    Transformed empirical CDF beside the annealed envelope F_a.

    F_a is 0 below 1 - p_bar.
    """
    rows = []
    for x in _check_points(xs):
        bound = annealed_cdf_bound(p_bar, x) if x >= 1.0 - p_bar else 0.0
        rows.append((x, transformed_cdf(log_partition, x), bound))
    return pd.DataFrame(rows, columns=ANNEALED_ENDPOINT_COLUMNS)


def rate_table(
    profile: RateProfile, alphas: Sequence[float], skip_invalid: bool = False
) -> pd.DataFrame:
    """
    Tabulate theta(alpha) and I(alpha).

    Args:
        profile: Rate profile of H
        alphas: Grid of alpha values
        skip_invalid: Drop (and log) alphas outside the solvable range
            instead of raising AlphaOutOfRange

    Returns:
        DataFrame with columns alpha, theta, I
    """
    rows = []
    for alpha in alphas:
        try:
            theta = solve_theta(profile.H, alpha)
        except AlphaOutOfRange as e:
            if not skip_invalid:
                raise
            logger.warning("Skipping alpha=%r: %s", alpha, e)
            continue
        rows.append((alpha, theta, rate_I(profile, alpha)))
    return pd.DataFrame(rows, columns=RATE_COLUMNS)


def estimate_quenched_rate(
    rule: SplittingRule, n: int, alphas: Sequence[float], seeds: Iterable[int]
) -> pd.DataFrame:
    """
    Seed-averaged finite-n rate -(1/n) log A_{n, floor(alpha n)} for a random rule.

    The annealed rate is reported alongside; the quenched rate dominates it.

    Returns:
        DataFrame with columns alpha, I_hat, stderr, I_annealed
    """
    if not rule.is_random:
        raise FragmentationError(f"Quenched rate estimation needs a random rule, got {rule.label}")
    seeds = list(seeds)
    if not seeds:
        raise BadGrid("At least one seed is required")

    estimates = np.empty((len(seeds), len(alphas)))
    for i, seed in enumerate(seeds):
        log_partition = evolve_log(realize_environment(rule, n, seed), n)
        estimates[i] = [rate_estimate(log_partition, alpha) for alpha in alphas]

    p_bar = rule.distribution.mean()
    spread = estimates.std(axis=0, ddof=1) / math.sqrt(len(seeds)) if len(seeds) > 1 else np.zeros(len(alphas))
    logger.info("Estimated quenched rate over %d environments at n=%d", len(seeds), n)
    return pd.DataFrame(
        {
            "alpha": list(alphas),
            "I_hat": estimates.mean(axis=0),
            "stderr": spread,
            "I_annealed": [annealed_rate(p_bar, alpha) for alpha in alphas],
        },
        columns=QUENCHED_COLUMNS,
    )
