"""Smallness thresholds ε₁, ε₂, ε₀ of the contraction argument, in log-domain.

For ball radius ``M`` and ``τ = M e^{CT}``:

    log ε₁ = log M − log(2CT(1 + TM)) − T e^{τ}
    log L  = bT e^{τ} + log(CT + bT e^{CT} e^{τ} (CMT + 1))
    log ε₂ = −log T − log L
    ε₀     = min{1, ε₁, ε₂}

``T e^{τ}`` is formed as ``exp(log T + τ)`` so overflow is detected instead
of silently producing ``inf``.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .types import ModelConstants

LOG_NEG_SENTINEL = -sys.float_info.max
LOG_POS_SENTINEL = sys.float_info.max
_LOG_FLOAT_MAX = math.log(sys.float_info.max)


@dataclass(frozen=True)
class ThresholdReport:
    log_eps1: float
    log_eps2: float
    eps0: float
    lipschitz_log: float
    m_bound: float
    overflow_flag: bool = False

    @property
    def log_eps0(self) -> float:
        return min(0.0, self.log_eps1, self.log_eps2)

    def to_json(self, path=None) -> str:
        text = json.dumps(asdict(self), indent=2, sort_keys=True)
        if path is not None:
            Path(path).write_text(text + "\n")
        return text


def _exp_or_none(x: float) -> float | None:
    return math.exp(x) if x < _LOG_FLOAT_MAX else None


def thresholds(m_tilde: float, mc: ModelConstants) -> ThresholdReport:
    """Thresholds for initial value ``w0 = m_tilde`` and ball radius ``M = 2 m_tilde``."""
    if not m_tilde > 0:
        raise ValueError(f"m_tilde must be > 0, got {m_tilde}")
    c, t, b = mc.c_const, mc.horizon, mc.b_const
    if not (c > 0 and t > 0):
        raise ValueError("thresholds need c_const > 0 and horizon > 0")
    m = 2.0 * m_tilde
    overflow = False

    ct = c * t
    tower = m * math.exp(ct) if ct < _LOG_FLOAT_MAX else math.inf

    t_exp_tower = _exp_or_none(math.log(t) + tower)
    if t_exp_tower is None:
        log_eps1 = LOG_NEG_SENTINEL
        overflow = True
    else:
        log_eps1 = math.log(m) - math.log(2.0 * ct * (1.0 + t * m)) - t_exp_tower

    bt_exp_tower = _exp_or_none(math.log(b * t) + tower)
    if bt_exp_tower is None:
        lipschitz_log = LOG_POS_SENTINEL
        log_eps2 = LOG_NEG_SENTINEL
        overflow = True
    else:
        second = float(np.logaddexp(math.log(ct),
                                    math.log(b * t) + ct + tower + math.log(c * m * t + 1.0)))
        lipschitz_log = bt_exp_tower + second
        log_eps2 = -math.log(t) - lipschitz_log

    log_eps0 = min(0.0, log_eps1, log_eps2)
    eps0 = 0.0 if overflow and log_eps0 == LOG_NEG_SENTINEL else math.exp(log_eps0)
    return ThresholdReport(log_eps1, log_eps2, eps0, lipschitz_log, m, overflow)


def predict_horizon(epsilon: float, m_tilde: float, c_const: float, *,
                    b_const: float = math.exp(-1.0), t_cap: float = 10.0,
                    rel_tol: float = 1e-14, max_iter: int = 400) -> float:
    """Largest horizon T with ``ε₀(T) ≥ epsilon``, by bisection on ``log ε₀``.

    Returns ``t_cap`` if ``ε₀(t_cap)`` is still at least ``epsilon``.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    target = math.log(epsilon)

    def log_eps0(t: float) -> float:
        mc = ModelConstants(c_const=c_const, horizon=t, b_const=b_const)
        return thresholds(m_tilde, mc).log_eps0

    f_hi = log_eps0(t_cap)
    if f_hi >= target:
        return t_cap
    lo, hi = 0.0, t_cap
    f_lo = 0.0  # ε₀ → 1 as T → 0
    for _ in range(max_iter):
        if hi - lo <= rel_tol * hi:
            break
        mid = 0.5 * (lo + hi)
        f_mid = log_eps0(mid)
        if not f_lo >= f_mid >= f_hi:
            raise AssertionError(f"eps0 not monotone in T near T={mid}")
        if f_mid >= target:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    return lo
