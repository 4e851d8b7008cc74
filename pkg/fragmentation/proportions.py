"""
Splitting rules: realization, moments, limit measures and the textual rule syntax.
"""

import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from .models import (
    AtomicMeasure,
    Environment,
    FragmentationError,
    IndexOutOfRange,
    InvalidProportion,
    ProportionDistribution,
    RuleKind,
    SplittingRule,
)
from .rng import ENVIRONMENT_STREAM, counter_uniforms

logger = logging.getLogger(__name__)

DEFAULT_LIMIT_ATOMS = 4096


class TableTooSmall(FragmentationError):
    """An explicit table or finite sequence does not cover 1..n_max."""


class NotStratified(FragmentationError):
    """The operation needs a rule whose proportions do not depend on k."""


class RuleSpecError(FragmentationError):
    """A textual rule specification cannot be parsed."""


def realize_environment(rule: SplittingRule, n_max: int, seed: int = 0) -> Environment:
    """
    Produce a concrete environment for 1 <= k <= n <= n_max.

    Random rules are reproducible from ``seed``: stratified draws are keyed by
    the step n alone, fully random draws by (n, k).

    Args:
        rule: Splitting rule to realize
        n_max: Largest step the environment must cover
        seed: 64-bit seed for random rules

    Returns:
        Environment
    """
    if n_max < 1:
        raise IndexOutOfRange(f"n_max must be >= 1, got {n_max}")

    steps = np.arange(1, n_max + 1)
    step_values = None
    table_rows = None

    if rule.kind is RuleKind.CONSTANT:
        step_values = np.full(n_max, rule.value)
    elif rule.kind is RuleKind.SEQUENCE:
        if rule.generator is None and not rule.cyclic and len(rule.sequence) < n_max:
            raise TableTooSmall(
                f"Sequence has {len(rule.sequence)} values but n_max={n_max}"
            )
        values = [rule.sequence_value(int(m)) for m in steps]
        step_values = np.asarray(values, dtype=float)
        if np.any(~np.isfinite(step_values)) or step_values.min() < 0 or step_values.max() > 1:
            raise InvalidProportion("Generated sequence value outside [0, 1]")
    elif rule.kind is RuleKind.RANDOM_STRATIFIED:
        u = counter_uniforms(seed, ENVIRONMENT_STREAM, steps, 1)
        step_values = rule.distribution.quantile(u)
    elif rule.kind is RuleKind.TABLE:
        table_rows = _table_rows(rule, n_max)

    step_values = None if step_values is None else np.asarray(step_values, dtype=float)
    if step_values is not None:
        step_values.setflags(write=False)

    logger.debug("Realized %s up to n_max=%d (seed=%d)", rule.label, n_max, seed)
    return Environment(
        rule=rule,
        n_max=n_max,
        seed=seed,
        step_values=step_values,
        table_rows=table_rows,
    )


def _table_rows(rule: SplittingRule, n_max: int):
    rows = [np.full(n, np.nan) for n in range(1, n_max + 1)]
    for n, k, p in rule.table:
        if n <= n_max:
            rows[n - 1][k - 1] = p
    for n, row in enumerate(rows, start=1):
        if np.isnan(row).any():
            missing = int(np.flatnonzero(np.isnan(row))[0]) + 1
            raise TableTooSmall(f"Table lacks entry p[{n},{missing}] required for n_max={n_max}")
        row.setflags(write=False)
    return tuple(rows)


def flip_environment(env: Environment) -> Environment:
    """Mirror-image environment, p_{n,k} replaced by 1 - p_{n,n+1-k}."""
    return Environment(
        rule=env.rule,
        n_max=env.n_max,
        seed=env.seed,
        step_values=env.step_values,
        table_rows=env.table_rows,
        flipped=not env.flipped,
    )


def flip_rule(rule: SplittingRule) -> SplittingRule:
    """Rule whose proportions have the law of 1 - P (statements near 1 become statements near 0)."""
    if rule.kind is RuleKind.CONSTANT:
        return SplittingRule.constant(1.0 - rule.value)
    if rule.kind is RuleKind.SEQUENCE:
        if rule.generator is not None:
            source = rule.generator
            return SplittingRule.deterministic_sequence(generator=lambda m: 1.0 - source(m))
        return SplittingRule.deterministic_sequence(
            [1.0 - v for v in rule.sequence], cyclic=rule.cyclic
        )
    if rule.kind is RuleKind.TABLE:
        return SplittingRule(
            RuleKind.TABLE, table=tuple((n, k, 1.0 - p) for n, k, p in rule.table)
        )
    return SplittingRule(rule.kind, distribution=rule.distribution.reflected())


def mean_proportion(dist: ProportionDistribution) -> float:
    """p_bar = E[P] in closed form."""
    return dist.mean()


def mean_p_one_minus_p(dist: ProportionDistribution) -> float:
    return dist.mean_p_one_minus_p()


def step_mean_param(rule: SplittingRule, n: int) -> float:
    """
    Bulk centering m_n: the sum of the first n proportions for deterministic
    rules, n * p_bar for random ones.
    """
    if rule.kind is RuleKind.CONSTANT:
        return n * rule.value
    if rule.kind is RuleKind.SEQUENCE:
        return float(np.sum(realize_environment(rule, n).step_values))
    if rule.is_random:
        return n * rule.distribution.mean()
    raise NotStratified("Bulk centering is undefined for an explicit table rule")


def step_variance_param(rule: SplittingRule, n: int) -> float:
    """
    Variance parameter s_n of the walk increment sum.

    Args:
        rule: Splitting rule
        n: Number of steps

    Returns:
        n p(1-p), sum p_k(1-p_k), or n E[P(1-P)] / n p_bar(1-p_bar) for random rules
    """
    if n < 0:
        raise IndexOutOfRange(f"n must be >= 0, got {n}")
    if rule.kind is RuleKind.CONSTANT:
        return n * rule.value * (1.0 - rule.value)
    if rule.kind is RuleKind.SEQUENCE:
        if n == 0:
            return 0.0
        values = realize_environment(rule, n).step_values
        return float(np.sum(values * (1.0 - values)))
    if rule.kind is RuleKind.RANDOM_STRATIFIED:
        return n * rule.distribution.mean_p_one_minus_p()
    if rule.kind is RuleKind.FULLY_RANDOM:
        p_bar = rule.distribution.mean()
        return n * p_bar * (1.0 - p_bar)
    rows = _table_rows(rule, n) if n else ()
    if any(np.ptp(row) > 0 for row in rows):
        raise NotStratified("Table rule has proportions that vary within a row")
    values = np.array([row[0] for row in rows])
    return float(np.sum(values * (1.0 - values)))


def empirical_proportion_measure(env: Environment, n: int) -> AtomicMeasure:
    """Empirical measure of the proportions used on steps 1..n."""
    if not env.rule.is_stratified:
        raise NotStratified(f"Empirical proportion measure needs a stratified rule, got {env.rule.label}")
    if not 1 <= n <= env.n_max:
        raise IndexOutOfRange(f"n={n} outside 1..{env.n_max}")
    values = env.step_values[:n]
    values = 1.0 - values if env.flipped else values
    return AtomicMeasure.from_samples(values)


def limit_measure(rule: SplittingRule, atoms: int = DEFAULT_LIMIT_ATOMS) -> AtomicMeasure:
    """
    Limit H of the empirical proportion measure.

    Uniform01 is replaced by its ``atoms``-point midpoint discretization.
    """
    if rule.kind is RuleKind.CONSTANT:
        return AtomicMeasure.dirac(rule.value)
    if rule.kind is RuleKind.RANDOM_STRATIFIED:
        dist = rule.distribution
        if dist.is_uniform:
            return AtomicMeasure.uniform_midpoint(atoms)
        return AtomicMeasure.from_pairs(zip(dist.locations, dist.weights))
    if rule.kind is RuleKind.SEQUENCE and rule.sequence:
        # a cyclic list has the equal-weight atoms as its limit; a finite
        # list is summarized by its own empirical measure
        return AtomicMeasure.from_samples(rule.sequence)
    raise NotStratified(f"No limit measure is defined for {rule.label}")


def parse_distribution(text: str) -> ProportionDistribution:
    """
    Parse ``point,v=..``, ``twopoint,v1=..,v2=..,w1=..``, ``uniform`` or
    ``atoms,t=a;b,w=c;d``.
    """
    name, _, rest = text.partition(",")
    params = _parse_params(rest)
    try:
        if name == "uniform":
            return ProportionDistribution.uniform()
        if name == "point":
            return ProportionDistribution.point_mass(float(params["v"]))
        if name == "twopoint":
            if "v" in params:
                v1, v2 = (float(v) for v in params["v"].split(";"))
                return ProportionDistribution.two_point(v1, v2, float(params["w"]))
            return ProportionDistribution.two_point(
                float(params["v1"]), float(params["v2"]), float(params["w1"])
            )
        if name == "atoms":
            locations = [float(t) for t in params["t"].split(";")]
            weights = [float(w) for w in params["w"].split(";")]
            return ProportionDistribution.atoms(zip(locations, weights))
    except KeyError as e:
        raise RuleSpecError(f"Distribution '{name}' is missing parameter {e}") from e
    except ValueError as e:
        if isinstance(e, FragmentationError):
            raise
        raise RuleSpecError(f"Bad number in distribution '{text}': {e}") from e
    raise RuleSpecError(f"Unknown distribution '{name}'")


def _parse_params(text: str) -> dict:
    params = {}
    for item in filter(None, text.split(",")):
        key, sep, value = item.partition("=")
        if not sep:
            raise RuleSpecError(f"Expected key=value, got '{item}'")
        params[key.strip()] = value.strip()
    return params


def parse_rule_spec(
    spec: str, base_dir: Optional[Union[str, Path]] = None
) -> SplittingRule:
    """
    Parse a textual rule specification.

    Accepted forms::

        const:p=0.3
        seq:file=path.csv            one proportion per line
        seq:values=0.2;0.7           repeated cyclically
        strat:dist=twopoint,v1=0.2,v2=0.7,w1=0.5
        full:dist=uniform
        table:file=path.csv          rows n,k,p

    Args:
        spec: Rule specification string
        base_dir: Directory that relative file paths are resolved against

    Returns:
        SplittingRule
    """
    kind, sep, body = spec.strip().partition(":")
    if not sep:
        raise RuleSpecError(f"Rule spec '{spec}' needs the form <kind>:<params>")

    try:
        if kind == "const":
            params = _parse_params(body)
            return SplittingRule.constant(float(params["p"]))
        if kind in ("strat", "full"):
            if not body.startswith("dist="):
                raise RuleSpecError(f"'{kind}' rule needs dist=<distribution>")
            dist = parse_distribution(body[len("dist="):])
            if kind == "strat":
                return SplittingRule.random_stratified(dist)
            return SplittingRule.fully_random(dist)
        if kind == "seq":
            params = _parse_params(body)
            if "values" in params:
                values = [float(v) for v in params["values"].split(";")]
                return SplittingRule.deterministic_sequence(values, cyclic=True)
            frame = _read_numeric_csv(_resolve(params["file"], base_dir), ["p"])
            return SplittingRule.deterministic_sequence(frame["p"].tolist())
        if kind == "table":
            params = _parse_params(body)
            frame = _read_numeric_csv(_resolve(params["file"], base_dir), ["n", "k", "p"])
            entries = {
                (int(n), int(k)): float(p)
                for n, k, p in frame.itertuples(index=False, name=None)
            }
            return SplittingRule.explicit_table(entries)
    except KeyError as e:
        raise RuleSpecError(f"Rule spec '{spec}' is missing parameter {e}") from e
    except ValueError as e:
        if isinstance(e, FragmentationError):
            raise
        raise RuleSpecError(f"Bad number in rule spec '{spec}': {e}") from e

    raise RuleSpecError(f"Unknown rule kind '{kind}'")


def _resolve(path: str, base_dir) -> Path:
    resolved = Path(path)
    if not resolved.is_absolute() and base_dir is not None:
        resolved = Path(base_dir) / resolved
    if not resolved.exists():
        raise RuleSpecError(f"Rule file not found: {resolved}")
    return resolved


def _read_numeric_csv(path: Path, columns) -> pd.DataFrame:
    """Read a headerless or headed numeric CSV; non-numeric lines are dropped."""
    frame = pd.read_csv(path, header=None, names=columns, comment="#", skip_blank_lines=True)
    frame = frame.apply(pd.to_numeric, errors="coerce").dropna()
    if frame.empty:
        raise RuleSpecError(f"No numeric rows in {path}")
    return frame
