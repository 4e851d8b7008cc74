"""
Fragmentation with erasure: simulation, exact walk representation and limit diagnostics.
"""

__version__ = "0.1.0"

from .fragmenter import (
    EmptyPartition,
    RowLengthMismatch,
    count_below,
    evolve,
    evolve_log,
    longest_interval,
    measure_of,
    rate_estimate,
    reflect,
    refine,
    refine_log,
    transformed_cdf,
    upper_transformed_cdf,
)
from .models import (
    AtomicMeasure,
    BulkScaling,
    DegenerateMeasure,
    DegenerateVariance,
    DistributionKind,
    EmpiricalQuery,
    Environment,
    FragmentationError,
    IndexOutOfRange,
    InvalidProportion,
    LogPartition,
    Partition,
    ProportionDistribution,
    RateProfile,
    RepresentationReport,
    RuleKind,
    SplittingRule,
    WalkDistribution,
    WalkSample,
)
from .proportions import (
    NotStratified,
    RuleSpecError,
    TableTooSmall,
    empirical_proportion_measure,
    flip_environment,
    flip_rule,
    limit_measure,
    mean_proportion,
    parse_rule_spec,
    realize_environment,
    step_mean_param,
    step_variance_param,
)
from .walk import (
    SizeMismatch,
    TooLarge,
    annealed_mean_cdf,
    binomial_cdf,
    enumerate_paths_oracle,
    simulate_walk,
    verify_representation,
    walk_cdf,
    walk_distribution,
)

__all__ = [
    "__version__",
    "AtomicMeasure",
    "BulkScaling",
    "DegenerateMeasure",
    "DegenerateVariance",
    "DistributionKind",
    "EmpiricalQuery",
    "EmptyPartition",
    "Environment",
    "FragmentationError",
    "IndexOutOfRange",
    "InvalidProportion",
    "LogPartition",
    "NotStratified",
    "Partition",
    "ProportionDistribution",
    "RateProfile",
    "RepresentationReport",
    "RowLengthMismatch",
    "RuleKind",
    "RuleSpecError",
    "SizeMismatch",
    "SplittingRule",
    "TableTooSmall",
    "TooLarge",
    "WalkDistribution",
    "WalkSample",
    "annealed_mean_cdf",
    "binomial_cdf",
    "count_below",
    "empirical_proportion_measure",
    "enumerate_paths_oracle",
    "evolve",
    "evolve_log",
    "flip_environment",
    "flip_rule",
    "limit_measure",
    "longest_interval",
    "mean_proportion",
    "measure_of",
    "parse_rule_spec",
    "rate_estimate",
    "realize_environment",
    "reflect",
    "refine",
    "refine_log",
    "simulate_walk",
    "step_mean_param",
    "step_variance_param",
    "transformed_cdf",
    "upper_transformed_cdf",
    "verify_representation",
    "walk_cdf",
    "walk_distribution",
]
