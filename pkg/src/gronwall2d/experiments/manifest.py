from __future__ import annotations

import hashlib
import json
import platform
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .. import __version__


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Path):
        return str(obj)
    if hasattr(obj, "item"):  # numpy scalars
        return obj.item()
    return obj


def config_hash(config: dict) -> str:
    blob = json.dumps(_jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    config: dict
    seed: int
    outputs: dict[str, str] = field(default_factory=dict)
    checks: dict[str, bool] = field(default_factory=dict)
    started: str = field(default_factory=now_iso)
    finished: str | None = None
    code_version: str = __version__
    python: str = platform.python_version()

    @property
    def config_hash(self) -> str:
        return config_hash(self.config)

    def finish(self, run_dir) -> Path:
        """Stamp the end time, check every output exists and write ``manifest.json``."""
        self.finished = now_iso()
        run_dir = Path(run_dir)
        missing = [name for name, rel in self.outputs.items() if not (run_dir / rel).exists()]
        if missing:
            raise FileNotFoundError(f"manifest references missing outputs: {missing}")
        data = _jsonable(asdict(self))
        data["config_hash"] = self.config_hash
        path = run_dir / "manifest.json"
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
        return path
