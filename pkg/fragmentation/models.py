"""
Core data models for the fragmentation toolkit.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .rng import ENVIRONMENT_STREAM, counter_uniforms

WEIGHT_TOLERANCE = 1e-12
MASS_TOLERANCE = 1e-12


class FragmentationError(ValueError):
    """Base class for every error raised by the toolkit."""


class InvalidProportion(FragmentationError):
    """A proportion, atom location or weight is outside its allowed range."""


class IndexOutOfRange(FragmentationError):
    """An (n, k) index falls outside the realized triangle or partition."""


class DegenerateMeasure(FragmentationError):
    """An atomic measure cannot support the requested computation."""


class DegenerateVariance(FragmentationError):
    """A bulk scaling would have zero (or undefined) spread."""


def _unit_interval_array(values: Iterable[float], what: str) -> np.ndarray:
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
    if arr.size and (not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0):
        raise InvalidProportion(
            f"{what} must lie in [0, 1] (got min={arr.min()!r}, max={arr.max()!r})"
        )
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


class DistributionKind(Enum):
    """Laws a splitting proportion can be drawn from."""

    POINT_MASS = "point"
    TWO_POINT = "twopoint"
    UNIFORM = "uniform"
    ATOMS = "atoms"


@dataclass(frozen=True)
class ProportionDistribution:
    """Law of a single splitting proportion (P_1 or P_{1,1})."""

    kind: DistributionKind
    locations: Tuple[float, ...] = ()
    weights: Tuple[float, ...] = ()

    def __post_init__(self):
        """Validate atom locations and weights."""
        if self.kind is DistributionKind.UNIFORM:
            if self.locations or self.weights:
                raise InvalidProportion("Uniform01 takes no atoms")
            return

        locations = _unit_interval_array(self.locations, "Atom locations")
        weights = np.asarray(self.weights, dtype=float)
        if locations.size == 0:
            raise InvalidProportion("A discrete distribution needs at least one atom")
        if locations.size != weights.size:
            raise InvalidProportion(
                f"Got {locations.size} atom locations but {weights.size} weights"
            )
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise InvalidProportion("Atom weights must be finite and nonnegative")
        total = math.fsum(weights.tolist())
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise InvalidProportion(f"Atom weights must sum to 1, got {total!r}")

        object.__setattr__(self, "locations", tuple(float(t) for t in locations))
        object.__setattr__(self, "weights", tuple(float(w) for w in weights))

    @classmethod
    def point_mass(cls, value: float) -> "ProportionDistribution":
        return cls(DistributionKind.POINT_MASS, (value,), (1.0,))

    @classmethod
    def two_point(cls, v1: float, v2: float, w1: float) -> "ProportionDistribution":
        if not 0.0 <= w1 <= 1.0:
            raise InvalidProportion(f"Two-point weight must lie in [0, 1], got {w1!r}")
        return cls(DistributionKind.TWO_POINT, (v1, v2), (w1, 1.0 - w1))

    @classmethod
    def uniform(cls) -> "ProportionDistribution":
        return cls(DistributionKind.UNIFORM)

    @classmethod
    def atoms(cls, pairs: Iterable[Tuple[float, float]]) -> "ProportionDistribution":
        pairs = list(pairs)
        return cls(
            DistributionKind.ATOMS,
            tuple(t for t, _ in pairs),
            tuple(w for _, w in pairs),
        )

    @property
    def is_uniform(self) -> bool:
        return self.kind is DistributionKind.UNIFORM

    def mean(self) -> float:
        """Closed-form E[P]."""
        if self.is_uniform:
            return 0.5
        return math.fsum(t * w for t, w in zip(self.locations, self.weights))

    def mean_p_one_minus_p(self) -> float:
        """Closed-form E[P(1-P)]."""
        if self.is_uniform:
            return 1.0 / 6.0
        return math.fsum(t * (1.0 - t) * w for t, w in zip(self.locations, self.weights))

    def quantile(self, u: np.ndarray) -> np.ndarray:
        """
        Map uniforms in (0, 1) to draws from this law (generalized inverse CDF).

        Args:
            u: Uniform variates strictly inside (0, 1)

        Returns:
            Array of proportions with the same shape as ``u``
        """
        u = np.asarray(u, dtype=float)
        if self.is_uniform:
            return u.copy()
        cumulative = np.cumsum(self.weights)
        index = np.searchsorted(cumulative, u, side="right")
        index = np.minimum(index, len(self.locations) - 1)
        return np.asarray(self.locations)[index]

    def reflected(self) -> "ProportionDistribution":
        """Law of 1 - P."""
        if self.is_uniform:
            return self
        return ProportionDistribution(
            self.kind,
            tuple(1.0 - t for t in self.locations),
            self.weights,
        )

    def describe(self) -> str:
        if self.is_uniform:
            return "uniform"
        atoms = ";".join(f"{t!r}:{w!r}" for t, w in zip(self.locations, self.weights))
        return f"{self.kind.value}[{atoms}]"


class RuleKind(Enum):
    """The fragmentation regimes."""

    CONSTANT = "const"
    SEQUENCE = "seq"
    RANDOM_STRATIFIED = "strat"
    FULLY_RANDOM = "full"
    TABLE = "table"


@dataclass(frozen=True)
class SplittingRule:
    """Declarative description of how the proportions p_{n,k} are produced."""

    kind: RuleKind
    value: Optional[float] = None
    sequence: Optional[Tuple[float, ...]] = None
    generator: Optional[Callable[[int], float]] = field(default=None, compare=False)
    cyclic: bool = False
    distribution: Optional[ProportionDistribution] = None
    table: Optional[Tuple[Tuple[int, int, float], ...]] = None
    label: str = ""

    def __post_init__(self):
        """Check that each regime carries the data it needs."""
        if self.kind is RuleKind.CONSTANT:
            if self.value is None:
                raise InvalidProportion("Constant rule needs a value")
            _unit_interval_array([self.value], "Constant proportion")
        elif self.kind is RuleKind.SEQUENCE:
            if self.generator is None and not self.sequence:
                raise InvalidProportion("Sequence rule needs values or a generator")
            if self.sequence:
                values = _unit_interval_array(self.sequence, "Sequence proportions")
                object.__setattr__(self, "sequence", tuple(float(v) for v in values))
        elif self.kind in (RuleKind.RANDOM_STRATIFIED, RuleKind.FULLY_RANDOM):
            if self.distribution is None:
                raise InvalidProportion(f"{self.kind.name} rule needs a distribution")
        elif self.kind is RuleKind.TABLE:
            if not self.table:
                raise InvalidProportion("Table rule needs entries")
            for n, k, p in self.table:
                if not (1 <= k <= n):
                    raise IndexOutOfRange(f"Table entry ({n}, {k}) is outside 1 <= k <= n")
                _unit_interval_array([p], f"Table entry p[{n},{k}]")

        if not self.label:
            object.__setattr__(self, "label", self._default_label())

    @classmethod
    def constant(cls, p: float) -> "SplittingRule":
        return cls(RuleKind.CONSTANT, value=float(p))

    @classmethod
    def deterministic_sequence(
        cls,
        values: Optional[Sequence[float]] = None,
        generator: Optional[Callable[[int], float]] = None,
        cyclic: bool = False,
    ) -> "SplittingRule":
        return cls(
            RuleKind.SEQUENCE,
            sequence=tuple(values) if values is not None else None,
            generator=generator,
            cyclic=cyclic,
        )

    @classmethod
    def random_stratified(cls, dist: ProportionDistribution) -> "SplittingRule":
        return cls(RuleKind.RANDOM_STRATIFIED, distribution=dist)

    @classmethod
    def fully_random(cls, dist: ProportionDistribution) -> "SplittingRule":
        return cls(RuleKind.FULLY_RANDOM, distribution=dist)

    @classmethod
    def explicit_table(cls, entries) -> "SplittingRule":
        """
        Build a table rule from a mapping {(n, k): p} or from rows p_{n,1..n}.
        """
        if hasattr(entries, "items"):
            triples = [(int(n), int(k), float(p)) for (n, k), p in entries.items()]
        else:
            triples = [
                (n, k, float(p))
                for n, row in enumerate(entries, start=1)
                for k, p in enumerate(row, start=1)
            ]
        return cls(RuleKind.TABLE, table=tuple(sorted(triples)))

    @property
    def is_stratified(self) -> bool:
        return self.kind in (RuleKind.CONSTANT, RuleKind.SEQUENCE, RuleKind.RANDOM_STRATIFIED)

    @property
    def is_random(self) -> bool:
        return self.kind in (RuleKind.RANDOM_STRATIFIED, RuleKind.FULLY_RANDOM)

    def sequence_value(self, m: int) -> float:
        """p_m of a deterministic sequence (1-based)."""
        if self.generator is not None:
            return float(self.generator(m))
        if self.cyclic:
            return self.sequence[(m - 1) % len(self.sequence)]
        return self.sequence[m - 1]

    def _default_label(self) -> str:
        if self.kind is RuleKind.CONSTANT:
            return f"const:p={self.value!r}"
        if self.kind is RuleKind.SEQUENCE:
            if self.generator is not None:
                return f"seq:generator={getattr(self.generator, '__name__', 'callable')}"
            mode = "cyclic" if self.cyclic else "finite"
            return f"seq:{mode}[{len(self.sequence)}]"
        if self.kind is RuleKind.TABLE:
            return f"table:entries={len(self.table)}"
        return f"{self.kind.value}:dist={self.distribution.describe()}"


@dataclass(frozen=True, eq=False)
class Environment:
    """
    A realized family of splitting proportions for 1 <= k <= n <= n_max.

    Stratified rules keep one value per step; fully random rules keep nothing
    and recompute p_{n,k} from (seed, n, k) on every access.
    """

    rule: SplittingRule
    n_max: int
    seed: int = 0
    step_values: Optional[np.ndarray] = None
    table_rows: Optional[Tuple[np.ndarray, ...]] = None
    flipped: bool = False

    def __post_init__(self):
        if self.n_max < 1:
            raise IndexOutOfRange(f"n_max must be >= 1, got {self.n_max}")

    def _check_step(self, n: int) -> None:
        if not 1 <= n <= self.n_max:
            raise IndexOutOfRange(f"Step n={n} outside 1..{self.n_max}")

    def _fully_random(self, n: int, ks: np.ndarray) -> np.ndarray:
        u = counter_uniforms(self.seed, ENVIRONMENT_STREAM, n, ks)
        return self.rule.distribution.quantile(u)

    def row(self, n: int) -> np.ndarray:
        """Proportions p_{n,1..n}."""
        return self.proportions_at(n, np.arange(1, n + 1))

    def proportions_at(self, n: int, ks: np.ndarray) -> np.ndarray:
        """
        Vectorized p_{n,k} lookup for an array of 1-based k.

        A flipped environment is the mirror image of the original one:
        its p_{n,k} is 1 - p_{n,n+1-k}.
        """
        self._check_step(n)
        ks = np.asarray(ks, dtype=np.int64)
        if ks.size and (ks.min() < 1 or ks.max() > n):
            raise IndexOutOfRange(f"Column index outside 1..{n} at step {n}")
        if self.flipped:
            ks = n + 1 - ks
        if self.rule.kind is RuleKind.FULLY_RANDOM:
            values = self._fully_random(n, ks)
        elif self.rule.kind is RuleKind.TABLE:
            values = self.table_rows[n - 1][ks - 1]
        else:
            values = np.full(ks.shape, self.step_values[n - 1])
        return 1.0 - values if self.flipped else values

    def proportion(self, n: int, k: int) -> float:
        return float(self.proportions_at(n, np.array([k]))[0])


@dataclass(frozen=True, eq=False)
class Partition:
    """Ordered break points a_{n,1..n}; a_{n,0}=0 and a_{n,n+1}=1 are implicit."""

    points: np.ndarray

    def __post_init__(self):
        """Validate ordering and range."""
        points = np.asarray(self.points, dtype=float)
        if points.ndim != 1:
            raise InvalidProportion("Break points must form a 1-D array")
        if points.size:
            if points[0] < 0.0 or points[-1] > 1.0 or np.any(np.diff(points) < 0):
                raise InvalidProportion("Break points must be sorted inside [0, 1]")
        object.__setattr__(self, "points", _frozen(points))

    @classmethod
    def trivial(cls) -> "Partition":
        return cls(np.empty(0))

    @property
    def n(self) -> int:
        return int(self.points.size)

    def gaps(self) -> np.ndarray:
        """Interval lengths a_{n,i+1} - a_{n,i}, i = 0..n."""
        return np.diff(np.concatenate(([0.0], self.points, [1.0])))

    def to_frame(self, log_points: Optional[np.ndarray] = None) -> pd.DataFrame:
        """Tabulate as ``k,a,log_a``."""
        if log_points is None:
            with np.errstate(divide="ignore"):
                log_points = np.log(self.points)
        return pd.DataFrame(
            {"k": np.arange(1, self.n + 1), "a": self.points, "log_a": log_points}
        )


@dataclass(frozen=True, eq=False)
class LogPartition:
    """Break points in the log domain, entries in [-inf, 0]."""

    logpoints: np.ndarray

    def __post_init__(self):
        logpoints = np.asarray(self.logpoints, dtype=float)
        if logpoints.ndim != 1:
            raise InvalidProportion("Log break points must form a 1-D array")
        if logpoints.size:
            finite = logpoints[np.isfinite(logpoints)]
            if np.any(np.isnan(logpoints)) or logpoints[-1] > 0.0:
                raise InvalidProportion("Log break points must lie in [-inf, 0]")
            if finite.size and np.any(np.diff(logpoints[logpoints > -np.inf]) < 0):
                raise InvalidProportion("Log break points must be non-decreasing")
        object.__setattr__(self, "logpoints", _frozen(logpoints))

    @property
    def n(self) -> int:
        return int(self.logpoints.size)

    def to_linear(self) -> Partition:
        return Partition(np.exp(self.logpoints))


@dataclass(frozen=True)
class EmpiricalQuery:
    """Interval [x, y] (closure per flags) for empirical-measure queries."""

    x: float
    y: float
    left_closed: bool = True
    right_closed: bool = True

    def __post_init__(self):
        if not self.x <= self.y:
            raise InvalidProportion(f"Query needs x <= y, got x={self.x!r}, y={self.y!r}")

    @classmethod
    def closed(cls, x: float, y: float) -> "EmpiricalQuery":
        return cls(x, y, True, True)

    @classmethod
    def half_open(cls, x: float, y: float) -> "EmpiricalQuery":
        """[x, y): adjacent half-open queries are additive."""
        return cls(x, y, True, False)


@dataclass(frozen=True, eq=False)
class WalkDistribution:
    """Law q_{n,j} = P(x_n = j), j = 0..n."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise InvalidProportion("Walk distribution needs a non-empty 1-D array")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise InvalidProportion("Walk probabilities must be finite and nonnegative")
        total = math.fsum(probs.tolist())
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise InvalidProportion(f"Walk probabilities sum to {total!r}, expected 1")
        object.__setattr__(self, "probs", _frozen(probs))

    @property
    def n(self) -> int:
        return int(self.probs.size - 1)

    def cdf(self) -> np.ndarray:
        return np.minimum(np.cumsum(self.probs), 1.0)

    def to_frame(self) -> pd.DataFrame:
        """Tabulate as ``k,prob,cdf``."""
        return pd.DataFrame(
            {"k": np.arange(self.n + 1), "prob": self.probs, "cdf": self.cdf()}
        )


@dataclass(frozen=True, eq=False)
class WalkSample:
    """Terminal values of independent quenched walk replicas."""

    values: np.ndarray
    n: int
    seed: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.int64)
        if values.size and (values.min() < 0 or values.max() > self.n):
            raise IndexOutOfRange(f"Walk values must lie in 0..{self.n}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def replicas(self) -> int:
        return int(self.values.size)

    def empirical_cdf(self, k: int) -> float:
        return float(np.count_nonzero(self.values <= k)) / self.replicas

    def to_frame(self) -> pd.DataFrame:
        """Tabulate as ``replica,x_n``."""
        return pd.DataFrame({"replica": np.arange(1, self.replicas + 1), "x_n": self.values})


@dataclass(frozen=True)
class RepresentationReport:
    """Outcome of comparing break points with the walk CDF."""

    max_abs_err: float
    worst_k: int
    n: int


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """Discrete probability measure H on [0, 1] with strictly increasing atoms."""

    locations: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        """Validate atoms and total mass."""
        locations = _unit_interval_array(self.locations, "Atom locations")
        weights = np.asarray(self.weights, dtype=float)
        if locations.size == 0 or locations.size != weights.size:
            raise DegenerateMeasure("Measure needs matching, non-empty locations and weights")
        if np.any(np.diff(locations) <= 0):
            raise DegenerateMeasure("Atom locations must be strictly increasing")
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
            raise DegenerateMeasure("Atom weights must be positive")
        total = math.fsum(weights.tolist())
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise DegenerateMeasure(f"Atom weights must sum to 1, got {total!r}")
        object.__setattr__(self, "locations", _frozen(locations))
        object.__setattr__(self, "weights", _frozen(weights))

    @classmethod
    def dirac(cls, t: float) -> "AtomicMeasure":
        return cls(np.array([t]), np.array([1.0]))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[float, float]]) -> "AtomicMeasure":
        """Merge equal locations and drop zero weights."""
        merged = {}
        for t, w in pairs:
            if w > 0:
                merged[float(t)] = merged.get(float(t), 0.0) + float(w)
        locations = sorted(merged)
        return cls(np.array(locations), np.array([merged[t] for t in locations]))

    @classmethod
    def from_samples(cls, values: Sequence[float]) -> "AtomicMeasure":
        """Empirical measure (1/n) sum of unit masses, atoms merged."""
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            raise DegenerateMeasure("Cannot build an empirical measure from no samples")
        locations, counts = np.unique(values, return_counts=True)
        return cls(locations, counts / values.size)

    @classmethod
    def uniform_midpoint(cls, atoms: int) -> "AtomicMeasure":
        """
        Midpoint-rule discretization of Uniform01.

        The log(1 - t) singularity at t = 1 leaves an O(log(m)/m) bias in
        integrals of that function.
        """
        if atoms < 1:
            raise DegenerateMeasure(f"Atom count must be >= 1, got {atoms}")
        return cls((np.arange(atoms) + 0.5) / atoms, np.full(atoms, 1.0 / atoms))

    @property
    def size(self) -> int:
        return int(self.locations.size)

    def mean(self) -> float:
        return math.fsum((self.locations * self.weights).tolist())

    def mass_at(self, t: float) -> float:
        hit = self.locations == t
        return float(self.weights[hit].sum()) if np.any(hit) else 0.0

    @property
    def mass_at_zero(self) -> float:
        return self.mass_at(0.0)

    @property
    def mass_at_one(self) -> float:
        return self.mass_at(1.0)

    @property
    def charges_interior(self) -> bool:
        return self.mass_at_zero + self.mass_at_one < 1.0

    def cdf(self, x: float) -> float:
        return float(self.weights[self.locations <= x].sum())


@dataclass(frozen=True)
class BulkScaling:
    """Centering m_n and spread sigma_n of the bulk normal approximation."""

    m_n: float
    sigma_n: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma_n) and self.sigma_n > 0):
            raise DegenerateVariance(f"sigma_n must be positive, got {self.sigma_n!r}")


@dataclass(frozen=True, eq=False)
class RateProfile:
    """
    Solved endpoint objects for a measure H.

    ``alpha_lo`` is H({1}), the floor of the solvable range of theta(alpha);
    ``I_floor`` is the limit of I at that floor, equal to ``I0`` when H({1}) = 0.
    """

    H: AtomicMeasure
    p_bar: float
    I0: float
    x_star: float
    alpha_lo: float
    I_floor: float

    @property
    def x_floor(self) -> float:
        return math.exp(-self.I_floor)
