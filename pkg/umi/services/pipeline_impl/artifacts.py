import json
import logging
import math
from pathlib import Path
from typing import Any

import numpy as np

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
REPORT_NAME = "report.json"
TIMINGS_NAME = "timings.json"


def _plain(value: Any) -> Any:
    """JSON-safe copy: numpy scalars unwrapped, non-finite floats as strings."""
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


class RunArtifacts:
    """Output directory of one run and the list of files written into it."""

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.manifest: list[str] = []

    def path(self, name: str) -> Path:
        return self.root / name

    def record(self, path: Path) -> Path:
        name = path.relative_to(self.root).as_posix()
        if name not in self.manifest:
            self.manifest.append(name)
        return path

    def write_json(self, name: str, payload: Any) -> Path:
        path = self.path(name)
        path.write_text(json.dumps(_plain(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return self.record(path)

    def write_manifest(self) -> Path:
        path = self.path(MANIFEST_NAME)
        path.write_text(json.dumps({"artifacts": self.manifest}, indent=2) + "\n", encoding="utf-8")
        logger.info(f"Manifest lists {len(self.manifest)} artifacts in {self.root}.")
        return path

    def existing(self, name: str) -> Path | None:
        path = self.path(name)
        return path if path.is_file() else None
