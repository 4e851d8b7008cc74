"""
Result management for experiment tables and their metadata sidecars.
"""

import json
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, TextIO

import pandas as pd

from . import __version__
from .logger import LoggerMixin

FLOAT_FORMAT = "%.17g"
SIDECAR_SUFFIX = ".meta.json"


def _jsonable(value: Any) -> Any:
    """Replace non-finite floats, which strict JSON cannot hold, by strings."""
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def build_metadata(command: str, config: Dict[str, Any], **extra: Any) -> Dict[str, Any]:
    """
    Metadata sufficient to reproduce an output exactly.

    No timestamps are recorded, so identical runs give identical sidecars.
    """
    metadata = {
        "package": "fragmentation",
        "version": __version__,
        "command": command,
        "config": config,
    }
    metadata.update(extra)
    return _jsonable(metadata)


class ResultManager(LoggerMixin):
    """Writes result tables as CSV with a JSON sidecar."""

    def __init__(self, base_dir: str = "results", float_format: str = FLOAT_FORMAT):
        """
        Initialize the result manager.

        Args:
            base_dir: Directory that relative file names are resolved against
            float_format: printf-style format for floats; the default round-trips doubles
        """
        self.base_dir = Path(base_dir)
        self.float_format = float_format

    def get_results_path(self, filename: str) -> Path:
        path = Path(filename)
        return path if path.is_absolute() else self.base_dir / path

    @staticmethod
    def sidecar_path(path: Path) -> Path:
        return path.with_name(path.name + SIDECAR_SUFFIX)

    @staticmethod
    def write_table(
        frame: pd.DataFrame, stream: Optional[TextIO] = None, float_format: str = FLOAT_FORMAT
    ) -> None:
        """Write a table to a stream (stdout by default), 17 significant digits unless overridden."""
        frame.to_csv(stream or sys.stdout, index=False, float_format=float_format, lineterminator="\n")

    def save_table(
        self, frame: pd.DataFrame, filename: str, metadata: Optional[Dict[str, Any]] = None
    ) -> Path:
        """
        Save a table and, if given, its metadata sidecar ``<file>.meta.json``.

        Args:
            frame: Table to save
            filename: File name, relative to base_dir unless absolute
            metadata: Sidecar content

        Returns:
            Path to the CSV file
        """
        path = self.get_results_path(filename)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            self.write_table(frame, f, self.float_format)

        if metadata is not None:
            with open(self.sidecar_path(path), "w", encoding="utf-8", newline="\n") as f:
                json.dump(metadata, f, indent=2, sort_keys=True)
                f.write("\n")

        self.logger.info(f"Saved {len(frame)} rows to {path}")
        return path

    def load_table(self, filename: str) -> pd.DataFrame:
        return pd.read_csv(self.get_results_path(filename))

    def load_metadata(self, filename: str) -> Dict[str, Any]:
        with open(self.sidecar_path(self.get_results_path(filename)), "r", encoding="utf-8") as f:
            return json.load(f)

    def list_results(self) -> List[str]:
        """CSV files under base_dir, sorted by name."""
        return sorted(p.name for p in self.base_dir.glob("*.csv"))
