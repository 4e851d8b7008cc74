"""
Logging setup driven by the ``logging:`` section of config.yaml.

Log records always go to stderr or a file, never to stdout, where the CSV
tables are written.
"""

import logging
import logging.handlers
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DEFAULT_LOG_FILE = "logs/fragmentation.log"
ROTATE_BYTES = 10 * 1024 * 1024

LOGGING_DEFAULTS: Dict[str, Any] = {
    "level": "WARNING",
    "format": DEFAULT_FORMAT,
    "handlers": [{"type": "console"}],
}


def _stderr_handler() -> logging.Handler:
    return logging.StreamHandler(sys.stderr)


def _file_handler(spec: Dict[str, Any]) -> logging.Handler:
    """Rotating file handler; ``max_bytes: 0`` disables rotation."""
    path = Path(spec.get("filename", DEFAULT_LOG_FILE))
    path.parent.mkdir(parents=True, exist_ok=True)
    max_bytes = spec.get("max_bytes", ROTATE_BYTES)
    if max_bytes <= 0:
        return logging.FileHandler(path, encoding="utf-8")
    return logging.handlers.RotatingFileHandler(
        path, maxBytes=max_bytes, backupCount=spec.get("backup_count", 5), encoding="utf-8"
    )


def _build_handlers(specs: Iterable[Dict[str, Any]]) -> list:
    # unknown types fall back to stderr
    return [_file_handler(spec) if spec.get("type") == "file" else _stderr_handler() for spec in specs]


def setup_logger(config: Optional[Dict[str, Any]] = None, level: Optional[str] = None) -> logging.Logger:
    """
    Configure the root logger for a CLI run or a test.

    Args:
        config: The ``logging:`` section (level, format, handlers)
        level: Level name that overrides the configured one, e.g. from ``--verbose``

    Returns:
        The root logger, with its previous handlers replaced
    """
    config = {**LOGGING_DEFAULTS, **(config or {})}
    root = logging.getLogger()
    root.handlers.clear()

    name = (level or config["level"]).upper()
    root.setLevel(getattr(logging, name, logging.WARNING))

    handlers = _build_handlers(config["handlers"] or ()) or [_stderr_handler()]
    formatter = logging.Formatter(config["format"])
    for handler in handlers:
        handler.setFormatter(formatter)
        root.addHandler(handler)
    return root


class LoggerMixin:
    """Gives a class a ``logger`` named after its module and class."""

    @property
    def logger(self) -> logging.Logger:
        cls = type(self)
        return logging.getLogger(f"{cls.__module__}.{cls.__name__}")
