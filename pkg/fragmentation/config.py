"""
Configuration management for the fragmentation toolkit.
"""

import logging
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import yaml
from dotenv import load_dotenv

logger = logging.getLogger(__name__)

CONFIG_ENV_VAR = "FRAGMENTATION_CONFIG"
CLOSURES = ("closed", "half-open")
CLOSURE_SWITCHES = {"closed": "closed", "half_open": "half-open"}


class ConfigurationError(Exception):
    """Custom exception for configuration-related errors."""
    pass


def _read_mapping(path: str) -> Dict[str, Any]:
    """Read a YAML or JSON file (JSON parses as YAML) into a dict."""
    with open(path, "r", encoding="utf-8") as file:
        data = yaml.safe_load(file) or {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"Configuration in {path} must be a mapping")
    return data


class ConfigManager:
    """Manages configuration loading and access for the toolkit."""

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialize the configuration manager.

        Args:
            config_path: Path to the configuration file. If None, uses
                $FRAGMENTATION_CONFIG or the default locations.
        """
        env_path = Path.cwd() / ".env"
        if env_path.exists():
            load_dotenv(env_path)
            logger.debug(f"Loaded environment variables from {env_path}")

        self.config_path = config_path or self._find_config_file()
        self._config: Dict[str, Any] = {}
        self.load_config()

    def _find_config_file(self) -> str:
        """Find the configuration file in default locations."""
        from_env = os.environ.get(CONFIG_ENV_VAR)
        if from_env:
            return from_env

        possible_paths = [
            "config.yaml",
            "fragmentation/config.yaml",
            os.path.expanduser("~/.fragmentation/config.yaml"),
        ]
        for path in possible_paths:
            if os.path.exists(path):
                return path
        return "config.yaml"

    def load_config(self) -> None:
        """Load configuration from file, falling back to defaults."""
        defaults = self._get_default_config()
        try:
            if os.path.exists(self.config_path):
                loaded = _read_mapping(self.config_path)
                self._config = {
                    section: {**values, **(loaded.get(section) or {})}
                    if isinstance(values, dict) else loaded.get(section, values)
                    for section, values in defaults.items()
                }
                logger.debug(f"Configuration loaded from {self.config_path}")
            else:
                logger.debug(f"Configuration file not found at {self.config_path}, using defaults")
                self._config = defaults
        except (yaml.YAMLError, ConfigurationError) as e:
            logger.error(f"Error parsing configuration: {e}")
            self._config = defaults
        except OSError as e:
            logger.error(f"Error loading configuration: {e}")
            self._config = defaults

    def _get_default_config(self) -> Dict[str, Any]:
        """Get default configuration values."""
        return {
            "simulation": {
                "rule": "const:p=0.5",
                "n": 1000,
                "seed": 0,
                "replicas": 0,
                "seeds": 20,
                "atoms": 4096,
                "closure": "closed",
            },
            "verification": {
                "environments": 100,
                "n": 200,
                "max_enum_n": 14,
                "binomial_max_n": 50,
                "duality_points": 25,
                "tolerance": 1e-11,
                "enumeration_tolerance": 1e-12,
            },
            "output": {
                "base_dir": "results",
                "float_format": "%.17g",
            },
            "logging": {
                "level": "WARNING",
                "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
                "handlers": [{"type": "console"}],
            },
        }

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get configuration value using dot notation.

        Args:
            key: Configuration key in dot notation (e.g., 'simulation.n')
            default: Default value if key not found

        Returns:
            Configuration value or default
        """
        value = self._config
        try:
            for k in key.split("."):
                value = value[k]
            return value
        except (KeyError, TypeError):
            return default

    def get_simulation_config(self) -> Dict[str, Any]:
        return self.get("simulation", {})

    def get_verification_config(self) -> Dict[str, Any]:
        return self.get("verification", {})

    def get_output_config(self) -> Dict[str, Any]:
        return self.get("output", {})

    def get_logging_config(self) -> Dict[str, Any]:
        return self.get("logging", {})


# Global configuration instance
_config_manager: Optional[ConfigManager] = None


def get_config_manager() -> ConfigManager:
    """Get the global configuration manager instance."""
    global _config_manager
    if _config_manager is None:
        _config_manager = ConfigManager()
    return _config_manager


def parse_pairs(value) -> Tuple[Tuple[float, float], ...]:
    """Parse ``"0.25:0.75,0.1:0.9"`` or a list of pairs."""
    if value is None:
        return ()
    if isinstance(value, str):
        items = [item.split(":") for item in value.split(",") if item.strip()]
    else:
        items = list(value)
    try:
        pairs = tuple((float(a), float(b)) for a, b in items)
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"Cannot parse grid pairs from {value!r}") from e
    return pairs


def parse_floats(value) -> Tuple[float, ...]:
    """Parse ``"0.1,0.2"`` or a list of numbers."""
    if value is None:
        return ()
    items = value.split(",") if isinstance(value, str) else value
    try:
        return tuple(float(v) for v in items if str(v).strip())
    except ValueError as e:
        raise ConfigurationError(f"Cannot parse numbers from {value!r}") from e


@dataclass
class ExperimentConfig:
    """
    Everything a command needs, echoed verbatim into output metadata.

    Values are layered defaults <- config file <- explicit flags.
    """

    command: str
    rule: str = "const:p=0.5"
    n: int = 1000
    seed: int = 0
    replicas: int = 0
    seeds: int = 20
    out: Optional[str] = None
    closure: str = "closed"
    atoms: int = 4096
    grid: Tuple[Tuple[float, float], ...] = ()
    xs: Tuple[float, ...] = ()
    alphas: Tuple[float, ...] = ()
    skip_invalid: bool = False
    exact_rate: bool = False
    empirical: bool = False
    flip: bool = False
    perturb: float = 0.0
    max_enum_n: int = 14

    def __post_init__(self):
        """Normalize and validate."""
        self.grid = parse_pairs(self.grid)
        self.xs = parse_floats(self.xs)
        self.alphas = parse_floats(self.alphas)
        try:
            self.n = int(self.n)
            self.seed = int(self.seed)
            self.replicas = int(self.replicas)
            self.seeds = int(self.seeds)
            self.atoms = int(self.atoms)
            self.max_enum_n = int(self.max_enum_n)
            self.perturb = float(self.perturb)
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"Invalid numeric setting: {e}") from e

        if self.n < 1:
            raise ConfigurationError("n must be ≥ 1")
        if self.replicas < 0:
            raise ConfigurationError("replicas must be ≥ 0")
        if self.seeds < 1:
            raise ConfigurationError("seeds must be ≥ 1")
        if self.atoms < 1:
            raise ConfigurationError("atoms must be ≥ 1")
        if self.max_enum_n < 0:
            raise ConfigurationError("max-enum-n must be ≥ 0")
        if self.closure not in CLOSURES:
            raise ConfigurationError(f"closure must be one of {CLOSURES}, got {self.closure!r}")

    @property
    def left_closed(self) -> bool:
        return True

    @property
    def right_closed(self) -> bool:
        return self.closure == "closed"

    @classmethod
    def build(
        cls,
        command: str,
        flags: Dict[str, Any],
        config_file: Optional[str] = None,
        defaults: Optional[Dict[str, Any]] = None,
    ) -> "ExperimentConfig":
        """
        Layer defaults, an optional YAML/JSON file and explicit flags.

        Args:
            command: Subcommand name
            flags: Flag values; None means "not given"
            config_file: Optional path whose keys mirror the flags
            defaults: Base values, usually the ``simulation`` config section

        Returns:
            ExperimentConfig
        """
        known = {f.name for f in fields(cls)} - {"command"}
        values: Dict[str, Any] = {}
        for source in (defaults or {}, _load_experiment_file(config_file), flags):
            for key, value in source.items():
                key = key.replace("-", "_")
                if key in CLOSURE_SWITCHES:
                    # file form of --closed / --half-open
                    if value:
                        values["closure"] = CLOSURE_SWITCHES[key]
                    continue
                if value is None:
                    continue
                if key not in known:
                    if source is not flags:
                        logger.warning(f"Ignoring unknown setting '{key}'")
                    continue
                values[key] = value
        return cls(command=command, **values)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["grid"] = [list(pair) for pair in self.grid]
        data["xs"] = list(self.xs)
        data["alphas"] = list(self.alphas)
        return data


def _load_experiment_file(path: Optional[str]) -> Dict[str, Any]:
    if not path:
        return {}
    if not os.path.exists(path):
        raise ConfigurationError(f"Config file not found: {path}")
    try:
        return _read_mapping(path)
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Cannot parse config file {path}: {e}") from e
