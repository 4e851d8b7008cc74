"""
Oracle battery run by the ``verify`` command.
"""

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional

import numpy as np

from .fragmenter import evolve, evolve_log
from .limits import (
    alpha_I,
    build_rate_profile,
    normal_cdf,
    normal_quantile,
    rate_I,
)
from .logger import LoggerMixin
from .models import AtomicMeasure, ProportionDistribution, SplittingRule
from .proportions import realize_environment
from .walk import binomial_cdf, enumerate_paths_oracle, walk_distribution

TWO_STEP_TABLE = {(1, 1): 2 / 3, (2, 1): 1 / 2, (2, 2): 2 / 3}
TWO_STEP_POINTS = (
    (Fraction(1, 3),),
    (Fraction(1, 6), Fraction(5, 9)),
)
LOG_AGREEMENT_FLOOR = 1e-290


@dataclass
class VerificationCheck:
    """Outcome of one oracle comparison."""

    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""


@dataclass
class VerificationReport:
    """Collection of checks; truthy iff every check passed."""

    checks: List[VerificationCheck] = field(default_factory=list)

    def add(self, name: str, value: float, tolerance: float, detail: str = "") -> VerificationCheck:
        check = VerificationCheck(
            name=name,
            passed=bool(np.isfinite(value) and value <= tolerance),
            value=float(value),
            tolerance=float(tolerance),
            detail=detail,
        )
        self.checks.append(check)
        return check

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[VerificationCheck]:
        return [check for check in self.checks if not check.passed]

    def __bool__(self):
        return self.passed

    def __str__(self):
        if self.passed:
            return f"Verification passed ({len(self.checks)} checks)"
        return "Verification failed: " + "; ".join(check.name for check in self.failures)

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "checks": [
                {**asdict(check), "status": "pass" if check.passed else "fail"}
                for check in self.checks
            ],
        }


class VerificationSuite(LoggerMixin):
    """
    Runs every oracle against the pipeline.

    ``perturb`` shifts computed break points before comparison, which must
    make the suite fail; it exists to test the harness itself.
    """

    def __init__(
        self,
        environments: int = 100,
        n: int = 200,
        max_enum_n: int = 14,
        binomial_max_n: int = 50,
        duality_points: int = 25,
        tolerance: float = 1e-11,
        enumeration_tolerance: float = 1e-12,
        perturb: float = 0.0,
        seed: int = 0,
    ):
        self.environments = environments
        self.n = n
        self.max_enum_n = max_enum_n
        self.binomial_max_n = binomial_max_n
        self.duality_points = duality_points
        self.tolerance = tolerance
        self.enumeration_tolerance = enumeration_tolerance
        self.perturb = perturb
        self.seed = seed
        self.uniform_rule = SplittingRule.fully_random(ProportionDistribution.uniform())

    def _points(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points) + self.perturb

    def run(self) -> VerificationReport:
        """Run all checks in a fixed order."""
        report = VerificationReport()
        checks: List[Callable[[VerificationReport], None]] = [
            self.check_two_step_example,
            self.check_representation,
            self.check_path_enumeration,
            self.check_binomial_reduction,
            self.check_structure,
            self.check_duality,
            self.check_quantile_inversion,
        ]
        for check in checks:
            check(report)
        for item in report.checks:
            log = self.logger.info if item.passed else self.logger.error
            log(f"{item.name}: {'pass' if item.passed else 'FAIL'} ({item.value:.3e} <= {item.tolerance:.1e})")
        return report

    def check_two_step_example(self, report: VerificationReport) -> None:
        env = realize_environment(SplittingRule.explicit_table(TWO_STEP_TABLE), 2)
        worst = 0.0
        for n, expected in enumerate(TWO_STEP_POINTS, start=1):
            points = self._points(evolve(env, n).points)
            worst = max(worst, max(abs(a - float(e)) for a, e in zip(points, expected)))
        report.add("two_step_golden", worst, 1e-15, "two-step table example")

    def check_representation(self, report: VerificationReport) -> None:
        worst = 0.0
        for offset in range(self.environments):
            env = realize_environment(self.uniform_rule, self.n, self.seed + offset)
            points = self._points(evolve(env, self.n).points)
            cdf = walk_distribution(env, self.n).cdf()[: self.n]
            worst = max(worst, float(np.max(np.abs(points - cdf))))
        report.add(
            "representation_identity",
            worst,
            self.tolerance,
            f"{self.environments} fully random environments, n={self.n}",
        )

    def check_path_enumeration(self, report: VerificationReport) -> None:
        if self.max_enum_n < 1:
            return
        worst = 0.0
        for offset in range(min(self.environments, 10)):
            env = realize_environment(self.uniform_rule, self.max_enum_n, self.seed + offset)
            for n in range(1, self.max_enum_n + 1):
                oracle = enumerate_paths_oracle(env, n)
                dp = walk_distribution(env, n)
                points = self._points(evolve(env, n).points)
                worst = max(
                    worst,
                    float(np.max(np.abs(oracle.probs - dp.probs))),
                    float(np.max(np.abs(points - oracle.cdf()[:n]))),
                )
        report.add(
            "path_enumeration",
            worst,
            self.enumeration_tolerance,
            f"n <= {self.max_enum_n}",
        )

    def check_binomial_reduction(self, report: VerificationReport) -> None:
        worst = 0.0
        n = self.binomial_max_n
        for p in np.round(np.arange(0.1, 1.0, 0.1), 1):
            env = realize_environment(SplittingRule.constant(float(p)), n)
            points = self._points(evolve(env, n).points)
            expected = np.array([binomial_cdf(n, float(p), k - 1) for k in range(1, n + 1)])
            worst = max(worst, float(np.max(np.abs(points - expected))))
        report.add("binomial_reduction", worst, 1e-12, f"constant p in 0.1..0.9, n={n}")

    def check_structure(self, report: VerificationReport) -> None:
        env = realize_environment(self.uniform_rule, self.n, self.seed)
        history: Dict[str, float] = {"order": 0.0, "sandwich": 0.0}
        previous = {"points": np.empty(0)}

        def inspect(m: int, points: np.ndarray) -> None:
            points = self._points(points)
            history["order"] = max(history["order"], float(max(0.0, -np.min(np.diff(points), initial=0.0))))
            left = np.concatenate(([0.0], previous["points"]))
            right = np.concatenate((previous["points"], [1.0]))
            excess = np.maximum(left - points, 0.0) + np.maximum(points - right, 0.0)
            history["sandwich"] = max(history["sandwich"], float(excess.max()))
            previous["points"] = points - self.perturb

        partition = evolve(env, self.n, callback=inspect)
        report.add("sorted", history["order"], 0.0, "break points non-decreasing")
        report.add("sandwich", history["sandwich"], 0.0, "a_{n-1,k-1} <= a_{n,k} <= a_{n-1,k}")
        report.add("unit_length", abs(float(partition.gaps().sum()) - 1.0), 1e-12, "gaps sum to 1")

        points = self._points(partition.points)
        logpoints = evolve_log(env, self.n).logpoints
        usable = points > LOG_AGREEMENT_FLOOR
        relative = np.abs(np.exp(logpoints[usable]) - points[usable]) / points[usable]
        report.add("log_linear_agreement", float(relative.max(initial=0.0)), 1e-10, "relative error")

        total = float(walk_distribution(env, self.n).probs.sum())
        report.add("mass_conservation", abs(total - 1.0), 1e-12, "walk probabilities sum to 1")

    def check_duality(self, report: VerificationReport) -> None:
        measures = {
            "point_half": AtomicMeasure.dirac(0.5),
            "two_point": AtomicMeasure.from_pairs([(0.2, 0.5), (0.8, 0.5)]),
        }
        worst = 0.0
        for measure in measures.values():
            profile = build_rate_profile(measure)
            for alpha in np.linspace(0.05, 0.95, self.duality_points) * profile.p_bar:
                x = float(np.exp(-rate_I(profile, float(alpha))))
                if x <= profile.x_star or x >= 1.0:
                    continue
                worst = max(worst, abs(alpha_I(profile, x) - alpha))
        report.add("duality_roundtrip", worst, 1e-8, "alpha_I(exp(-I(alpha))) = alpha")

    def check_quantile_inversion(self, report: VerificationReport) -> None:
        lower = np.logspace(-8, np.log10(0.5), 60)
        grid = np.concatenate((lower, 1.0 - lower[::-1]))
        worst = max(abs(normal_cdf(normal_quantile(float(u))) - u) for u in grid)
        report.add("quantile_inversion", worst, 1e-12, "|Phi(Q(u)) - u|")


def suite_from_settings(settings: Dict, perturb: float = 0.0, max_enum_n: Optional[int] = None, seed: int = 0) -> VerificationSuite:
    """Build a suite from the ``verification`` config section."""
    return VerificationSuite(
        environments=int(settings.get("environments", 100)),
        n=int(settings.get("n", 200)),
        max_enum_n=int(max_enum_n if max_enum_n is not None else settings.get("max_enum_n", 14)),
        binomial_max_n=int(settings.get("binomial_max_n", 50)),
        duality_points=int(settings.get("duality_points", 25)),
        tolerance=float(settings.get("tolerance", 1e-11)),
        enumeration_tolerance=float(settings.get("enumeration_tolerance", 1e-12)),
        perturb=perturb,
        seed=seed,
    )
