from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .grid import Grid2D


def write_snapshot(path, values: np.ndarray, name: str, g: Grid2D, time: float) -> tuple[Path, Path]:
    """Raw little-endian float64, row-major (axis 0 = x₁), plus a JSON sidecar."""
    path = Path(path)
    data = np.ascontiguousarray(values, dtype="<f8")
    if data.shape != (g.n, g.n):
        raise ValueError(f"expected shape {(g.n, g.n)}, got {data.shape}")
    path.write_bytes(data.tobytes(order="C"))
    sidecar = path.with_suffix(path.suffix + ".json")
    sidecar.write_text(json.dumps({"n": g.n, "length": g.length, "time": time, "field": name},
                                  indent=2, sort_keys=True) + "\n")
    return path, sidecar


def read_snapshot(path) -> tuple[np.ndarray, dict]:
    path = Path(path)
    meta = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    data = np.frombuffer(path.read_bytes(), dtype="<f8").reshape(meta["n"], meta["n"])
    return data.copy(), meta
