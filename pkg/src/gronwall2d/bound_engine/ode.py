"""Dormand–Prince 5(4) integrator with PI step-size control.

Small and dependency-free on purpose: the bound equations need structured
aborts (exponent cap, blow-up time) and exact landing on requested output
times, which is easier to guarantee here than through a generic wrapper.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..errors import BlowUpError, BoundOverflowError

# Butcher tableau (Dormand & Prince 1980), FSAL.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array(_A[6] + [0.0])
# 5th minus embedded 4th order weights
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])

_SAFETY = 0.9
_BETA = 0.04
_ALPHA = 0.2 - 0.75 * _BETA
_FAC_MIN, _FAC_MAX = 0.2, 10.0

RHS = Callable[[float, np.ndarray], np.ndarray]


def _rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(x * x)))


def _initial_step(fun: RHS, t0: float, y0: np.ndarray, f0: np.ndarray,
                  rtol: float, atol: float, span: float) -> float:
    scale = atol + rtol * np.abs(y0)
    d0, d1 = _rms(y0 / scale), _rms(f0 / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    try:
        f1 = fun(t0 + h0, y0 + h0 * f0)
        d2 = _rms((f1 - f0) / scale) / h0
    except BoundOverflowError:
        return h0 * 1e-3
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, span)


def dopri5(fun: RHS, t_end: float, y0, *, rtol: float = 1e-10, atol: float = 1e-12,
           t_eval=None, max_steps: int = 1_000_000, check=None):
    """Integrate ``y' = fun(t, y)`` from 0 to ``t_end``.

    Returns ``(times, states)`` with ``states[i]`` the solution at
    ``times[i]``. With ``t_eval`` the output grid is exactly ``t_eval``
    (must start at 0 and end at ``t_end``); otherwise every accepted step is
    reported. ``check(t, y)`` is called on every accepted state and may raise.

    A ``BoundOverflowError`` from ``fun`` rejects the trial step; if the step
    size collapses the integration aborts with ``BlowUpError`` carrying the
    reached time and the partial solution (``trajectory`` = (times, states)).
    """
    y = np.array(y0, dtype=float)
    if t_eval is None:
        targets = np.array([t_end], dtype=float)
        dense_out = False
    else:
        targets = np.asarray(t_eval, dtype=float)
        if targets[0] != 0.0 or targets[-1] != t_end or np.any(np.diff(targets) <= 0):
            raise ValueError("t_eval must be strictly increasing from 0 to t_end")
        targets = targets[1:]
        dense_out = True

    ts, ys = [0.0], [y.copy()]
    if t_end == 0.0:
        return np.array(ts), np.array(ys)

    t = 0.0
    f = fun(t, y)
    h = _initial_step(fun, t, y, f, rtol, atol, t_end)
    err_old = 1e-4
    just_rejected = False
    k = np.empty((7, y.size))
    target_idx = 0

    for _ in range(max_steps):
        target = targets[target_idx]
        h_min = 16 * np.spacing(max(abs(t), 1.0))
        if h < h_min:
            raise BlowUpError(f"step size collapsed at t={t:.16g}", time=t,
                              trajectory=(np.array(ts), np.array(ys)))
        landing = t + h >= target - h_min
        h_step = target - t if landing else h

        k[0] = f
        try:
            for s in range(1, 7):
                k[s] = fun(t + _C[s] * h_step, y + h_step * (_A[s] @ k[:s]))
            y_new = y + h_step * (_B[:6] @ k[:6])
            if not np.all(np.isfinite(y_new)) or not np.all(np.isfinite(k)):
                raise BoundOverflowError("non-finite stage")
        except BoundOverflowError:
            h = h_step * _FAC_MIN
            just_rejected = True
            continue

        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = _rms(h_step * (_E @ k) / scale)

        if err <= 1.0:
            err = max(err, 1e-10)
            fac = _SAFETY * err ** -_ALPHA * err_old ** _BETA
            fac = min(_FAC_MAX, max(_FAC_MIN, fac))
            if just_rejected:
                fac = min(fac, 1.0)
            err_old = err
            just_rejected = False
            t_new = target if landing else t + h_step
            if check is not None:
                try:
                    check(t_new, y_new)
                except BlowUpError as exc:
                    exc.trajectory = (np.array(ts), np.array(ys))
                    raise
            t, y, f = t_new, y_new, k[6].copy()
            # a step clipped to hit an output time says little about the natural step
            if not (landing and h_step < h):
                h = h_step * fac
            if landing:
                target_idx += 1
            if landing or not dense_out:
                ts.append(t)
                ys.append(y.copy())
            if target_idx == targets.size:
                return np.array(ts), np.array(ys)
        else:
            h = h_step * max(_FAC_MIN, _SAFETY * err ** -0.2)
            just_rejected = True

    raise BlowUpError(f"max_steps={max_steps} exhausted at t={t:.16g}", time=t,
                      trajectory=(np.array(ts), np.array(ys)))
