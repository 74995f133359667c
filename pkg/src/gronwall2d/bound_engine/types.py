from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

DEFAULT_EXP_CAP = 700.0


@dataclass(frozen=True)
class ModelConstants:
    """Constants of the bound equations.

    ``c_const`` is the generic constant C, ``b_const`` the factor in front of
    the exponential history integral (1/e unless overridden), ``epsilon`` the
    perturbation amplitude and ``horizon`` the final time T. ``exp_cap`` is the
    largest exponent argument any solver evaluates before reporting overflow.
    """

    c_const: float
    horizon: float
    epsilon: float = 0.0
    b_const: float = math.exp(-1.0)
    exp_cap: float = DEFAULT_EXP_CAP

    def __post_init__(self):
        for name in ("c_const", "horizon", "epsilon", "b_const", "exp_cap"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
        if self.c_const < 0:
            raise ValueError(f"c_const must be >= 0, got {self.c_const}")
        if self.horizon < 0:
            raise ValueError(f"horizon must be >= 0, got {self.horizon}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if self.b_const <= 0:
            raise ValueError(f"b_const must be > 0, got {self.b_const}")
        if self.exp_cap <= 0:
            raise ValueError("exp_cap must be > 0")

    def with_(self, **changes) -> ModelConstants:
        return replace(self, **changes)


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Trajectory:
    """Scalar samples on a strictly increasing time grid starting at 0."""

    times: np.ndarray
    values: np.ndarray
    label: str = field(default="value", compare=False)

    def __post_init__(self):
        t = _frozen(self.times)
        v = _frozen(self.values)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        if t.ndim != 1 or t.shape != v.shape or t.size == 0:
            raise ValueError("times and values must be non-empty 1-D arrays of equal length")
        if t[0] != 0.0:
            raise ValueError(f"trajectory must start at t=0, got {t[0]}")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        if not np.all(np.isfinite(v)) or not np.all(np.isfinite(t)):
            raise ValueError("trajectory contains non-finite entries")

    def __len__(self) -> int:
        return self.times.size

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def final(self) -> float:
        return float(self.values[-1])

    def at(self, t):
        """Linear interpolation; raises outside [0, t_end]."""
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0) or np.any(t_arr > self.t_end):
            raise ValueError(f"t outside [0, {self.t_end}]")
        out = np.interp(t_arr, self.times, self.values)
        return float(out) if out.ndim == 0 else out

    def map(self, fn, label: str | None = None) -> Trajectory:
        return Trajectory(self.times, fn(self.times, self.values), label or self.label)

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "value"])
            for t, v in zip(self.times, self.values):
                writer.writerow([repr(float(t)), repr(float(v))])
        return path

    @classmethod
    def from_csv(cls, path, label: str = "value") -> Trajectory:
        with Path(path).open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != ["t", "value"]:
                raise ValueError(f"unexpected trajectory header {header}")
            rows = [(float(a), float(b)) for a, b in reader]
        t, v = zip(*rows)
        return cls(np.array(t), np.array(v), label)
