"""
Pytest configuration and fixtures for fragmentation tests.
"""

from pathlib import Path

import pytest

import fragmentation.config as config_module
from fragmentation.limits import build_rate_profile
from fragmentation.models import AtomicMeasure, ProportionDistribution, SplittingRule
from fragmentation.proportions import realize_environment

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

TWO_STEP_ENTRIES = {(1, 1): 2 / 3, (2, 1): 1 / 2, (2, 2): 2 / 3}


@pytest.fixture
def two_step_rule():
    """Two-step table rule: p11 = 2/3, p21 = 1/2, p22 = 2/3."""
    return SplittingRule.explicit_table(TWO_STEP_ENTRIES)


@pytest.fixture
def two_step_env(two_step_rule):
    """Realized two-step worked example."""
    return realize_environment(two_step_rule, 2)


@pytest.fixture
def two_step_csv():
    """The worked example as a ``table:`` file."""
    return DATA_DIR / "two_step_table.csv"


@pytest.fixture
def half_rule():
    """Constant rule p = 1/2 (binomial reduction)."""
    return SplittingRule.constant(0.5)


@pytest.fixture
def uniform_full_rule():
    """Fully random rule with Uniform01 proportions."""
    return SplittingRule.fully_random(ProportionDistribution.uniform())


@pytest.fixture
def uniform_strat_rule():
    """Random stratified rule with Uniform01 proportions."""
    return SplittingRule.random_stratified(ProportionDistribution.uniform())


@pytest.fixture
def two_point_measure():
    """H with equal atoms at 0.2 and 0.8."""
    return AtomicMeasure.from_pairs([(0.2, 0.5), (0.8, 0.5)])


@pytest.fixture
def half_profile():
    """Rate profile of the point mass at 1/2."""
    return build_rate_profile(AtomicMeasure.dirac(0.5))


@pytest.fixture
def fresh_config(tmp_path, monkeypatch):
    """
    Run with a clean global ConfigManager and the working directory in tmp_path,
    so no repository config.yaml or .env leaks into the test.
    """
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv(config_module.CONFIG_ENV_VAR, raising=False)
    monkeypatch.setattr(config_module, "_config_manager", None)
    yield tmp_path
    config_module._config_manager = None
