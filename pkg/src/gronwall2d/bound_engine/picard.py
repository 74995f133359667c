"""Fixed-point iteration for the mild form of the reduced Boussinesq bound.

With ``x = 1 + log z`` and ``w = e^{-Ct} x`` the bound equation becomes
``w(t) = w0 + ε ∫_0^t F(τ, w) dτ`` where

    F(t, w) = C { w(t) ∫_0^t exp[b I(s)] ds + e^{-Ct} exp[b I(t)] },
    I(t)    = ∫_0^t exp(w(τ) e^{Cτ}) dτ.

All integrals are composite trapezoid sums on the grid of the iterate.
"""

from __future__ import annotations

import math
import warnings
from typing import NamedTuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from ..errors import BoundOverflowError, HistoryGapError, NoConvergenceError, RegimeWarning
from .thresholds import thresholds
from .types import ModelConstants, Trajectory


def _f_on_grid(ts: np.ndarray, w: np.ndarray, mc: ModelConstants) -> np.ndarray:
    c, b, cap = mc.c_const, mc.b_const, mc.exp_cap
    arg = w * np.exp(c * ts)
    if arg.max() > cap:
        raise BoundOverflowError(f"inner exponent {arg.max():.6g} exceeds cap {cap}",
                                 time=float(ts[np.argmax(arg > cap)]))
    inner = b * cumulative_trapezoid(np.exp(arg), ts, initial=0.0)
    if inner.max() > cap:
        raise BoundOverflowError(f"history exponent {inner.max():.6g} exceeds cap {cap}",
                                 time=float(ts[np.argmax(inner > cap)]))
    g = np.exp(inner)
    outer = cumulative_trapezoid(g, ts, initial=0.0)
    return c * (w * outer + np.exp(-c * ts) * g)


def eval_F_boussinesq(t: float, w_hist: Trajectory, mc: ModelConstants) -> float:
    """Value of the history functional F at time ``t`` for the history ``w_hist``.

    If ``t`` falls between grid points the history is cut there, with the
    end value interpolated linearly.
    """
    ts, ws = w_hist.times, w_hist.values
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t > ts[-1] * (1 + 1e-14):
        raise HistoryGapError(f"history ends at {ts[-1]}, F requested at t={t}")
    if t == 0.0:
        return _f_on_grid(ts[:1], ws[:1], mc)[-1]
    j = int(np.searchsorted(ts, t, side="left"))
    if j < ts.size and ts[j] == t:
        cut_t, cut_w = ts[: j + 1], ws[: j + 1]
    else:
        j = min(j, ts.size - 1)
        cut_t = np.append(ts[:j], t)
        cut_w = np.append(ws[:j], np.interp(t, ts, ws))
    return float(_f_on_grid(cut_t, cut_w, mc)[-1])


def picard_map(w: np.ndarray, ts: np.ndarray, w0: float, mc: ModelConstants) -> np.ndarray:
    """One application of ``w ↦ w0 + ε ∫ F(τ, w) dτ`` on the grid ``ts``."""
    if mc.epsilon == 0.0:
        return np.full_like(w, w0)
    f = _f_on_grid(ts, w, mc)
    return w0 + mc.epsilon * cumulative_trapezoid(f, ts, initial=0.0)


class PicardResult(NamedTuple):
    trajectory: Trajectory
    iterations: int
    contraction_estimate: float
    in_regime: bool


def picard_solve(w0: float, mc: ModelConstants, grid_n: int = 1000, tol: float = 1e-10,
                 max_iter: int = 200) -> PicardResult:
    """Fixed point of the mild-form map on a uniform grid of ``grid_n + 1`` points.

    ``contraction_estimate`` is the largest ratio of consecutive sup-norm
    iterate differences (ratios whose denominator is at round-off level are
    skipped). Outside the contraction regime ``ε < ε₂`` a ``RegimeWarning``
    is issued and the iteration is attempted anyway.
    """
    if not w0 > 1.0:
        raise ValueError(f"w0 must be > 1, got {w0}")
    if grid_n < 2:
        raise ValueError("grid_n must be >= 2")
    in_regime = True
    if mc.epsilon > 0.0:
        report = thresholds(w0, mc)
        if math.log(mc.epsilon) >= report.log_eps2:
            in_regime = False
            warnings.warn(f"epsilon={mc.epsilon:g} >= eps2={math.exp(report.log_eps2):.6g}; "
                          "contraction is not guaranteed", RegimeWarning, stacklevel=2)

    ts = np.linspace(0.0, mc.horizon, grid_n + 1)
    w = np.full(ts.size, float(w0))
    prev_diff = None
    ratio = 0.0
    for it in range(1, max_iter + 1):
        w_new = picard_map(w, ts, w0, mc)
        diff = float(np.max(np.abs(w_new - w)))
        floor = 64 * np.finfo(float).eps * float(np.max(np.abs(w_new)))
        if prev_diff is not None and prev_diff > floor:
            ratio = max(ratio, diff / prev_diff)
        w, prev_diff = w_new, diff
        if diff < tol:
            return PicardResult(Trajectory(ts, w, label="w"), it, ratio, in_regime)
    raise NoConvergenceError(f"Picard iteration did not converge in {max_iter} iterations "
                             f"(last difference {prev_diff:.3e})", max_iter, prev_diff)


def w_to_z(w: Trajectory, c_const: float) -> Trajectory:
    """Map the reduced variable back: ``x = e^{Ct} w``, ``z = e^{x-1}``."""
    return w.map(lambda t, v: np.exp(np.exp(c_const * t) * v - 1.0), label="z")


def z_to_w(z: Trajectory, c_const: float) -> Trajectory:
    return z.map(lambda t, v: np.exp(-c_const * t) * (1.0 + np.log(v)), label="w")
