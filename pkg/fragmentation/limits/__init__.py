"""
Limit theory: normal functions, bulk diagnostics and the endpoint rate calculus.
"""

from .diagnostics import (
    ANNEALED_ENDPOINT_COLUMNS,
    BULK_COLUMNS,
    ENDPOINT_COLUMNS,
    QUENCHED_COLUMNS,
    RATE_COLUMNS,
    WEAK_LIMIT_COLUMNS,
    BadGrid,
    annealed_endpoint_table,
    bulk_deviation,
    endpoint_deviation,
    estimate_quenched_rate,
    hoeffding_bound,
    make_bulk_scaling,
    make_realized_bulk_scaling,
    mesh_scaling,
    rate_table,
    weak_limit_deviation,
)
from .normal import DomainError, normal_cdf, normal_quantile
from .rate_function import (
    AlphaOutOfRange,
    ThetaSolution,
    XOutOfRange,
    alpha_I,
    annealed_cdf_bound,
    annealed_rate,
    build_rate_profile,
    lambda_fn,
    lambda_prime,
    lambda_second,
    rate_I,
    rate_I0_and_xstar,
    solve_theta,
    theta_solution,
    tilde_g_cdf,
)

__all__ = [
    "ANNEALED_ENDPOINT_COLUMNS",
    "BULK_COLUMNS",
    "ENDPOINT_COLUMNS",
    "QUENCHED_COLUMNS",
    "RATE_COLUMNS",
    "WEAK_LIMIT_COLUMNS",
    "AlphaOutOfRange",
    "BadGrid",
    "DomainError",
    "ThetaSolution",
    "XOutOfRange",
    "alpha_I",
    "annealed_cdf_bound",
    "annealed_endpoint_table",
    "annealed_rate",
    "build_rate_profile",
    "bulk_deviation",
    "endpoint_deviation",
    "estimate_quenched_rate",
    "hoeffding_bound",
    "lambda_fn",
    "lambda_prime",
    "lambda_second",
    "make_bulk_scaling",
    "make_realized_bulk_scaling",
    "mesh_scaling",
    "normal_cdf",
    "normal_quantile",
    "rate_I",
    "rate_I0_and_xstar",
    "rate_table",
    "solve_theta",
    "theta_solution",
    "tilde_g_cdf",
    "weak_limit_deviation",
]
