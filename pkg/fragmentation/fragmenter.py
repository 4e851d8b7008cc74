"""
Iterated fragmentation of [0, 1] in the linear and log domains.
"""

import logging
import math
from typing import Callable, Optional

import numpy as np

from .models import (
    EmpiricalQuery,
    Environment,
    FragmentationError,
    IndexOutOfRange,
    InvalidProportion,
    LogPartition,
    Partition,
)
from .proportions import flip_environment

logger = logging.getLogger(__name__)

StepCallback = Callable[[int, np.ndarray], None]


class RowLengthMismatch(FragmentationError):
    """A proportion row does not have one entry per existing interval."""


class EmptyPartition(FragmentationError):
    """The partition has no break points."""


def _check_row(row, expected: int) -> np.ndarray:
    row = np.asarray(row, dtype=float)
    if row.ndim != 1 or row.size != expected:
        raise RowLengthMismatch(f"Expected {expected} proportions, got {row.size}")
    if not np.all(np.isfinite(row)) or row.min() < 0.0 or row.max() > 1.0:
        raise InvalidProportion("Proportions must lie in [0, 1]")
    return row


def _refine_points(points: np.ndarray, row: np.ndarray) -> np.ndarray:
    left = np.concatenate(([0.0], points))
    right = np.concatenate((points, [1.0]))
    new = row * left + (1.0 - row) * right
    # keeps each new point inside its parent interval under rounding
    return np.clip(new, left, right)


def _refine_logpoints(logpoints: np.ndarray, row: np.ndarray) -> np.ndarray:
    left = np.concatenate(([-np.inf], logpoints))
    right = np.concatenate((logpoints, [0.0]))
    with np.errstate(divide="ignore", invalid="ignore"):
        new = np.logaddexp(np.log(row) + left, np.log1p(-row) + right)
    return np.clip(new, left, right)


def refine(partition: Partition, row) -> Partition:
    """
    Split every interval of ``partition`` once.

    The new point in [a_{k-1}, a_k] is p_k * a_{k-1} + (1 - p_k) * a_k.

    Args:
        partition: Current partition with n points
        row: n + 1 proportions p_{n+1,1..n+1}

    Returns:
        Partition with n + 1 points
    """
    row = _check_row(row, partition.n + 1)
    return Partition(_refine_points(partition.points, row))


def refine_log(partition: LogPartition, row) -> LogPartition:
    """Log-domain counterpart of :func:`refine`."""
    row = _check_row(row, partition.n + 1)
    return LogPartition(_refine_logpoints(partition.logpoints, row))


def _check_steps(env: Environment, n: int) -> None:
    if n < 0 or n > env.n_max:
        raise IndexOutOfRange(f"Cannot evolve {n} steps in an environment of n_max={env.n_max}")


def evolve(env: Environment, n: int, callback: Optional[StepCallback] = None) -> Partition:
    """
    Apply n refinements starting from the trivial partition.

    Args:
        env: Realized environment with n_max >= n
        n: Number of steps
        callback: Optional ``callback(m, points)`` invoked after each step

    Returns:
        Partition P_n
    """
    _check_steps(env, n)
    points = np.empty(0)
    for m in range(1, n + 1):
        points = _refine_points(points, env.row(m))
        if callback is not None:
            callback(m, points)
    logger.debug("Evolved %s for %d steps", env.rule.label, n)
    return Partition(points)


def evolve_log(env: Environment, n: int, callback: Optional[StepCallback] = None) -> LogPartition:
    """
    Apply n refinements in the log domain.

    log a_{n,k} = logaddexp(log p + log a_{n-1,k-1}, log(1-p) + log a_{n-1,k})
    stays finite long after the linear points underflow.
    """
    _check_steps(env, n)
    logpoints = np.empty(0)
    for m in range(1, n + 1):
        logpoints = _refine_logpoints(logpoints, env.row(m))
        if callback is not None:
            callback(m, logpoints)
    logger.debug("Evolved %s for %d steps in the log domain", env.rule.label, n)
    return LogPartition(logpoints)


def reflect(partition: Partition) -> Partition:
    """Mirror image 1 - a_{n,n+1-k}; the partition of the flipped environment."""
    return Partition(1.0 - partition.points[::-1])


def measure_of(partition: Partition, query: EmpiricalQuery) -> float:
    """
    Empirical measure f_n of the query interval.

    Endpoint inclusion follows the query's closure flags, so ties with break
    points are resolved exactly.
    """
    if partition.n == 0:
        raise EmptyPartition("The trivial partition carries no empirical measure")
    points = partition.points
    lo = np.searchsorted(points, query.x, side="left" if query.left_closed else "right")
    hi = np.searchsorted(points, query.y, side="right" if query.right_closed else "left")
    return max(int(hi) - int(lo), 0) / partition.n


def count_below(partition: Partition, x: float) -> int:
    """k_n(x): the number of break points strictly below x."""
    return int(np.searchsorted(partition.points, x, side="left"))


def transformed_cdf(log_partition: LogPartition, x: float) -> float:
    """
    g_n([0, x]) = (1/n) #{k : a_{n,k} <= x^n}, evaluated as
    #{k : log a_{n,k} <= n log x}.
    """
    if log_partition.n == 0:
        raise EmptyPartition("The trivial partition carries no transformed measure")
    threshold = -np.inf if x <= 0 else log_partition.n * math.log(min(x, 1.0))
    count = np.searchsorted(log_partition.logpoints, threshold, side="right")
    return int(count) / log_partition.n


def upper_transformed_cdf(env: Environment, n: int, x: float) -> float:
    """Share of break points in [1 - x^n, 1], computed on the flipped environment."""
    return transformed_cdf(evolve_log(flip_environment(env), n), x)


def longest_interval(partition: Partition) -> float:
    return float(partition.gaps().max())


def rate_estimate(log_partition: LogPartition, alpha: float) -> float:
    """
    Finite-n rate -(1/n) log a_{n, floor(alpha n)}.

    Raises:
        IndexOutOfRange: if floor(alpha n) < 1 or > n
    """
    n = log_partition.n
    k = math.floor(alpha * n)
    if not 1 <= k <= n:
        raise IndexOutOfRange(f"floor(alpha*n)={k} outside 1..{n} for alpha={alpha!r}")
    return -float(log_partition.logpoints[k - 1]) / n + 0.0
