"""
Tests for the configuration and logging setup.
"""

import json
import logging

import pytest
import yaml

import fragmentation.config as config_module
from fragmentation.config import (
    ConfigManager,
    ConfigurationError,
    ExperimentConfig,
    get_config_manager,
    parse_floats,
    parse_pairs,
)
from fragmentation.logger import LoggerMixin, setup_logger


class TestConfigManager:
    """Test cases for ConfigManager."""

    def test_defaults_without_file(self, fresh_config):
        config = ConfigManager()
        assert config.get("simulation.rule") == "const:p=0.5"
        assert config.get("verification.max_enum_n") == 14
        assert config.get("missing.key", "fallback") == "fallback"

    def test_file_overrides_merge_with_defaults(self, fresh_config):
        (fresh_config / "config.yaml").write_text(
            yaml.safe_dump({"simulation": {"n": 50}, "verification": {"environments": 3}})
        )
        config = ConfigManager()
        assert config.get("simulation.n") == 50
        assert config.get("simulation.atoms") == 4096
        assert config.get_verification_config()["environments"] == 3

    def test_environment_variable_selects_file(self, fresh_config, monkeypatch):
        path = fresh_config / "other.yaml"
        path.write_text(yaml.safe_dump({"output": {"base_dir": "elsewhere"}}))
        monkeypatch.setenv(config_module.CONFIG_ENV_VAR, str(path))
        assert ConfigManager().get_output_config()["base_dir"] == "elsewhere"

    def test_dotenv_is_loaded(self, fresh_config, monkeypatch):
        path = fresh_config / "from_dotenv.yaml"
        path.write_text(yaml.safe_dump({"simulation": {"seed": 17}}))
        (fresh_config / ".env").write_text(f"{config_module.CONFIG_ENV_VAR}={path}\n")
        config = ConfigManager()
        monkeypatch.delenv(config_module.CONFIG_ENV_VAR, raising=False)
        assert config.get("simulation.seed") == 17

    def test_malformed_file_falls_back(self, fresh_config):
        (fresh_config / "config.yaml").write_text("simulation: [unclosed\n")
        assert ConfigManager().get("simulation.n") == 1000

    def test_global_instance(self, fresh_config):
        assert get_config_manager() is get_config_manager()


class TestParsing:
    """Test cases for grid parsing helpers."""

    def test_pairs(self):
        assert parse_pairs("0.25:0.75,0.1:0.9") == ((0.25, 0.75), (0.1, 0.9))
        assert parse_pairs([[0.2, 0.4]]) == ((0.2, 0.4),)
        assert parse_pairs(None) == ()

    def test_bad_pairs(self):
        with pytest.raises(ConfigurationError):
            parse_pairs("0.25-0.75")

    def test_floats(self):
        assert parse_floats("0.1,0.2,") == (0.1, 0.2)
        assert parse_floats([0.5]) == (0.5,)

    def test_bad_floats(self):
        with pytest.raises(ConfigurationError):
            parse_floats("0.1,abc")


class TestExperimentConfig:
    """Test cases for ExperimentConfig."""

    def test_n_must_be_positive(self):
        with pytest.raises(ConfigurationError, match="n must be ≥ 1"):
            ExperimentConfig(command="fragment", n=0)

    def test_closure(self):
        assert ExperimentConfig(command="bulk").right_closed
        assert not ExperimentConfig(command="bulk", closure="half-open").right_closed
        with pytest.raises(ConfigurationError):
            ExperimentConfig(command="bulk", closure="open")

    def test_layering(self, tmp_path):
        """Flags override the file, which overrides the defaults."""
        path = tmp_path / "experiment.json"
        path.write_text(json.dumps({"n": 30, "seed": 4, "grid": "0.2:0.8"}))
        cfg = ExperimentConfig.build(
            "bulk",
            {"n": 40, "seed": None, "rule": None},
            str(path),
            defaults={"rule": "full:dist=uniform", "n": 10, "closure": "closed"},
        )
        assert cfg.n == 40
        assert cfg.seed == 4
        assert cfg.rule == "full:dist=uniform"
        assert cfg.grid == ((0.2, 0.8),)

    def test_yaml_file_with_dashed_keys(self, tmp_path):
        path = tmp_path / "experiment.yaml"
        path.write_text("max-enum-n: 6\nskip-invalid: true\n")
        cfg = ExperimentConfig.build("verify", {}, str(path))
        assert cfg.max_enum_n == 6
        assert cfg.skip_invalid is True

    @pytest.mark.parametrize(
        "settings, closure",
        [
            ({"half-open": True}, "half-open"),
            ({"half_open": True}, "half-open"),
            ({"closure": "half-open", "closed": True}, "closed"),
            ({"half_open": False}, "closed"),
        ],
    )
    def test_closure_switches_in_file(self, tmp_path, settings, closure):
        path = tmp_path / "experiment.json"
        path.write_text(json.dumps(settings))
        cfg = ExperimentConfig.build("bulk", {"closure": None}, str(path), defaults={"closure": "closed"})
        assert cfg.closure == closure

    def test_closure_flag_overrides_file_switch(self, tmp_path):
        path = tmp_path / "experiment.yaml"
        path.write_text("half_open: true\n")
        cfg = ExperimentConfig.build("bulk", {"closure": "closed"}, str(path))
        assert cfg.right_closed

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError, match="not found"):
            ExperimentConfig.build("fragment", {}, str(tmp_path / "absent.json"))

    def test_to_dict_is_json_ready(self):
        cfg = ExperimentConfig(command="bulk", grid="0.25:0.75", xs="0.6")
        data = cfg.to_dict()
        assert data["grid"] == [[0.25, 0.75]]
        assert data["xs"] == [0.6]
        json.dumps(data)


class TestLoggerSetup:
    """Test cases for setup_logger and LoggerMixin."""

    def test_level_override(self):
        root = setup_logger({"level": "INFO", "handlers": [{"type": "console"}]}, level="debug")
        assert root.level == logging.DEBUG
        assert len(root.handlers) == 1

    def test_default_handler(self):
        root = setup_logger({"level": "ERROR", "handlers": []})
        assert root.level == logging.ERROR
        assert isinstance(root.handlers[0], logging.StreamHandler)

    def test_file_handler(self, tmp_path):
        logfile = tmp_path / "logs" / "run.log"
        root = setup_logger({"level": "INFO", "handlers": [{"type": "file", "filename": str(logfile)}]})
        logging.getLogger("fragmentation.test").info("written")
        for handler in root.handlers:
            handler.flush()
        assert "written" in logfile.read_text()
        for handler in root.handlers:
            handler.close()
        root.handlers.clear()

    def test_mixin_logger_name(self):
        class Worker(LoggerMixin):
            pass

        assert Worker().logger.name.endswith(".Worker")
