from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import Trajectory


@dataclass(frozen=True)
class ComparisonReport:
    holds: bool
    first_crossing: float | None
    times: np.ndarray
    y: np.ndarray
    z: np.ndarray

    @property
    def max_gap(self) -> float:
        """Largest value of ``y - z`` on the common grid (negative when holds)."""
        return float(np.max(self.y - self.z))


def comparison_verify(y: Trajectory, z: Trajectory) -> ComparisonReport:
    """Check ``y <= z`` on the union of both time grids (restricted to the common span).

    When the inequality fails, ``first_crossing`` is the first time where
    ``y - z`` reaches zero, located by linear interpolation between the two
    bracketing grid points.
    """
    t_end = min(y.t_end, z.t_end)
    if t_end <= 0.0 and (len(y) > 1 and len(z) > 1):
        raise ValueError("trajectories share no common time span")
    grid = np.union1d(y.times[y.times <= t_end], z.times[z.times <= t_end])
    yv = np.interp(grid, y.times, y.values)
    zv = np.interp(grid, z.times, z.values)
    d = yv - zv
    bad = np.flatnonzero(d > 0)
    if bad.size == 0:
        return ComparisonReport(True, None, grid, yv, zv)
    j = int(bad[0])
    if j == 0:
        crossing = float(grid[0])
    else:
        i = j - 1
        crossing = float(grid[i] + (grid[j] - grid[i]) * (-d[i]) / (d[j] - d[i]))
    return ComparisonReport(False, crossing, grid, yv, zv)
