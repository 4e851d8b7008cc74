"""
The random walk in a random environment behind the fragmentation.

Starting at x_0 = 0, the walk steps x_m = x_{m-1} + 1 with probability
p_{m, x_{m-1}+1}. Its quenched CDF reproduces the break points:
a_{n,k} = P(x_n <= k - 1).
"""

import logging
from typing import Iterable, Tuple

import numpy as np
from scipy.special import gammaln, logsumexp

from .fragmenter import evolve
from .models import (
    Environment,
    FragmentationError,
    IndexOutOfRange,
    InvalidProportion,
    Partition,
    RepresentationReport,
    SplittingRule,
    WalkDistribution,
    WalkSample,
)
from .proportions import realize_environment
from .rng import WALK_STREAM, counter_uniforms

logger = logging.getLogger(__name__)

ENUMERATION_LIMIT = 20


class TooLarge(FragmentationError):
    """Path enumeration was requested beyond its size limit."""


class SizeMismatch(FragmentationError):
    """Two objects that must describe the same n do not."""


def walk_distribution(env: Environment, n: int) -> WalkDistribution:
    """
    Exact quenched law of x_n by dynamic programming.

    q_{m,j} = q_{m-1,j} (1 - p_{m,j+1}) + q_{m-1,j-1} p_{m,j}

    Args:
        env: Realized environment with n_max >= n
        n: Number of steps

    Returns:
        WalkDistribution over 0..n
    """
    if n < 0 or n > env.n_max:
        raise IndexOutOfRange(f"n={n} outside 0..{env.n_max}")
    q = np.ones(1)
    for m in range(1, n + 1):
        row = env.row(m)
        q = np.concatenate((q * (1.0 - row), [0.0])) + np.concatenate(([0.0], q * row))
    return WalkDistribution(q)


def walk_cdf(dist: WalkDistribution, k: int) -> float:
    """P(x_n <= k); 0 for k < 0 and 1 for k >= n."""
    if k < 0:
        return 0.0
    if k >= dist.n:
        return 1.0
    return float(min(dist.probs[: k + 1].sum(), 1.0))


def binomial_cdf(n: int, p: float, k: int) -> float:
    """
    P(Binomial(n, p) <= k) summed in the log domain.

    The shorter tail is accumulated with logsumexp so neither tail loses
    relative accuracy.
    """
    if n < 0:
        raise IndexOutOfRange(f"n must be >= 0, got {n}")
    if not 0.0 <= p <= 1.0:
        raise InvalidProportion(f"p must lie in [0, 1], got {p!r}")
    if k < 0:
        return 0.0
    if k >= n:
        return 1.0
    if p == 0.0:
        return 1.0
    if p == 1.0:
        return 0.0

    j = np.arange(n + 1)
    log_pmf = (
        gammaln(n + 1) - gammaln(j + 1) - gammaln(n - j + 1)
        + j * np.log(p) + (n - j) * np.log1p(-p)
    )
    if k < n * p:
        return float(min(np.exp(logsumexp(log_pmf[: k + 1])), 1.0))
    return float(max(-np.expm1(logsumexp(log_pmf[k + 1:])), 0.0))


def enumerate_paths_oracle(env: Environment, n: int) -> WalkDistribution:
    """
    Law of x_n by summing over all 2^n step sequences.

    Independent of the dynamic program; used as a test oracle.
    """
    if n > ENUMERATION_LIMIT:
        raise TooLarge(f"Path enumeration is limited to n <= {ENUMERATION_LIMIT}, got {n}")
    if n < 0 or n > env.n_max:
        raise IndexOutOfRange(f"n={n} outside 0..{env.n_max}")

    positions = np.zeros(1, dtype=np.int64)
    weights = np.ones(1)
    for m in range(1, n + 1):
        p = env.proportions_at(m, positions + 1)
        positions = np.concatenate((positions, positions + 1))
        weights = np.concatenate((weights * (1.0 - p), weights * p))
    return WalkDistribution(np.bincount(positions, weights=weights, minlength=n + 1))


def simulate_walk(env: Environment, n: int, replicas: int, seed: int) -> WalkSample:
    """
    Monte Carlo replicas of the quenched walk in a fixed environment.

    Step m of replica r uses the uniform keyed by (seed, r, m), so a replica's
    path does not depend on how many others are simulated.
    """
    if n < 0 or n > env.n_max:
        raise IndexOutOfRange(f"n={n} outside 0..{env.n_max}")
    if replicas < 1:
        raise IndexOutOfRange(f"replicas must be >= 1, got {replicas}")

    ids = np.arange(replicas)
    x = np.zeros(replicas, dtype=np.int64)
    for m in range(1, n + 1):
        p = env.proportions_at(m, x + 1)
        u = counter_uniforms(seed, WALK_STREAM, ids, m)
        x += u <= p
    logger.debug("Simulated %d walk replicas of length %d", replicas, n)
    return WalkSample(values=x, n=n, seed=seed)


def verify_representation(partition: Partition, dist: WalkDistribution) -> RepresentationReport:
    """Compare a_{n,k} with P(x_n <= k - 1) for k = 1..n."""
    if partition.n != dist.n:
        raise SizeMismatch(f"Partition has n={partition.n} but walk law has n={dist.n}")
    if partition.n == 0:
        return RepresentationReport(max_abs_err=0.0, worst_k=0, n=0)
    cdf = dist.cdf()[: partition.n]
    errors = np.abs(partition.points - cdf)
    worst = int(np.argmax(errors))
    return RepresentationReport(max_abs_err=float(errors[worst]), worst_k=worst + 1, n=partition.n)


def annealed_mean_cdf(
    rule: SplittingRule, n: int, k: int, seeds: Iterable[int]
) -> Tuple[float, float]:
    """
    Average of a_{n,k} = P(x_n <= k - 1) over independent environments.

    Returns:
        (mean, standard error) over the seeds
    """
    if not 1 <= k <= n:
        raise IndexOutOfRange(f"k={k} outside 1..{n}")
    values = np.array([evolve(realize_environment(rule, n, seed), n).points[k - 1] for seed in seeds])
    if values.size == 0:
        raise IndexOutOfRange("At least one seed is required")
    stderr = float(values.std(ddof=1) / np.sqrt(values.size)) if values.size > 1 else 0.0
    return float(values.mean()), stderr
