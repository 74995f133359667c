"""Augmented (memoryless) form of the history-dependent bound equations.

The history integrals are carried as extra state variables:

* Boussinesq: ``A = ∫ z``, ``B = ∫ exp(A)``;
* density-dependent Euler: ``A = ∫ (Υ - 1)``, ``I2 = ∫ Z³Y(1 + Y + ε²Z⁶)``
  with ``Y = Υ - 1`` and ``Z = exp(C A)``.

This turns each integro-differential equation into a 3-dimensional ODE.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from ..errors import BlowUpError, BoundOverflowError, NumericalFailure
from .ode import dopri5
from .types import ModelConstants, Trajectory

System = Literal["boussinesq", "nh_euler"]
SYSTEMS = ("boussinesq", "nh_euler")


@dataclass(frozen=True)
class AugmentedStateBoussinesq:
    z: float
    a: float = 0.0
    bint: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.z, self.a, self.bint])


@dataclass(frozen=True)
class AugmentedStateNhEuler:
    upsilon: float
    a: float = 0.0
    i2: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.upsilon, self.a, self.i2])


def _log_principal(x: float, cap: float) -> float:
    if not x > 0:
        raise BoundOverflowError(f"principal variable left (0, inf): {x}")
    lx = math.log(x)
    if lx > cap:
        raise BoundOverflowError(f"log of principal variable {lx:.6g} exceeds cap {cap}")
    return lx


def _boussinesq_rhs(y: np.ndarray, c: float, eps: float, cap: float) -> np.ndarray:
    z, a, b = y
    lz = _log_principal(z, cap)
    if a > cap:
        raise BoundOverflowError(f"history exponent A={a:.6g} exceeds cap {cap}")
    ea = math.exp(a)
    x = 1.0 + lz
    return np.array([c * z * (x + eps * x * b + eps * ea), z, ea])


def _nheuler_rhs(y: np.ndarray, c: float, eps: float, cap: float,
                 z_front: float = 1.0) -> np.ndarray:
    u, a, i2 = y
    lu = _log_principal(u, cap)
    ca = c * a
    # Z^9 is the largest power evaluated
    if 9.0 * (ca + math.log(z_front)) > cap or ca > cap:
        raise BoundOverflowError(f"history exponent C*A={ca:.6g} exceeds cap {cap}/9")
    eca = math.exp(ca)
    zz = z_front * eca
    ym1 = u - 1.0
    h = (1.0 + lu) * eca + u * lu * i2 + eps * lu * i2 * eca
    z3 = zz ** 3
    return np.array([
        c * u * (1.0 + lu + eps * h),
        ym1,
        z3 * ym1 * (1.0 + ym1 + eps * eps * z3 * z3),
    ])


def rhs_boussinesq_augmented(s: AugmentedStateBoussinesq, mc: ModelConstants) -> AugmentedStateBoussinesq:
    """Time derivative ``(dz/dt, dA/dt, dB/dt)`` of the Boussinesq bound state."""
    if s.z < 1.0:
        raise ValueError(f"z must be >= 1, got {s.z}")
    dz, da, db = _boussinesq_rhs(s.as_array(), mc.c_const, mc.epsilon, mc.exp_cap)
    return AugmentedStateBoussinesq(dz, da, db)


def rhs_nheuler_augmented(s: AugmentedStateNhEuler, mc: ModelConstants,
                          z_front: float = 1.0) -> AugmentedStateNhEuler:
    """Time derivative ``(dΥ/dt, dA/dt, dI2/dt)`` of the density-Euler bound state.

    ``z_front`` multiplies ``Z = exp(C A)`` inside the ``I2`` integrand; it
    stands for the ``‖φ0‖_{H³}`` factor that is usually absorbed into C.
    """
    if s.upsilon < 1.0:
        raise ValueError(f"upsilon must be >= 1, got {s.upsilon}")
    du, da, di = _nheuler_rhs(s.as_array(), mc.c_const, mc.epsilon, mc.exp_cap, z_front)
    return AugmentedStateNhEuler(du, da, di)


def closed_form_eps0(t, z0: float, c_const: float):
    """Solution of ``z' = C z (1 + log z)``: ``exp((1 + log z0) e^{Ct} - 1)``."""
    return np.exp((1.0 + np.log(z0)) * np.exp(c_const * np.asarray(t, dtype=float)) - 1.0)


def _principal_check():
    def check(t, y):
        if y[0] < 1.0:
            raise NumericalFailure(f"principal variable fell below 1 at t={t}", time=t)
    return check


def integrate_augmented(system: System, z0: float, mc: ModelConstants, *,
                        rel_tol: float = 1e-10, abs_tol: float = 1e-12,
                        t_eval=None, z_front: float = 1.0):
    """Integrate the full augmented system; returns ``(times, states)``."""
    if system not in SYSTEMS:
        raise ValueError(f"unknown system {system!r}")
    if not z0 > 1.0:
        raise ValueError(f"z0 must be > 1, got {z0}")
    c, eps, cap = mc.c_const, mc.epsilon, mc.exp_cap
    if system == "boussinesq":
        fun = lambda t, y: _boussinesq_rhs(y, c, eps, cap)  # noqa: E731
    else:
        fun = lambda t, y: _nheuler_rhs(y, c, eps, cap, z_front)  # noqa: E731
    return dopri5(fun, mc.horizon, [z0, 0.0, 0.0], rtol=rel_tol, atol=abs_tol,
                  t_eval=t_eval, check=_principal_check())


def integrate_bound(system: System, z0: float, mc: ModelConstants, rel_tol: float = 1e-10,
                    abs_tol: float = 1e-12, *, t_eval=None, z_front: float = 1.0) -> Trajectory:
    """Principal-variable trajectory of the bound equation over ``[0, mc.horizon]``.

    Raises ``BlowUpError`` (with ``time`` and the partial principal
    ``trajectory``) if the solution exceeds the exponent cap before the horizon.
    """
    try:
        ts, ys = integrate_augmented(system, z0, mc, rel_tol=rel_tol, abs_tol=abs_tol,
                                     t_eval=t_eval, z_front=z_front)
    except BlowUpError as exc:
        ts, ys = exc.trajectory
        exc.trajectory = Trajectory(ts, ys[:, 0], label=system)
        raise
    return Trajectory(ts, ys[:, 0], label=system)


@dataclass(frozen=True)
class HistoryFunctional:
    """History-dependent forcing ``F̄(t, y)`` expressed through running integrals.

    ``rates(t, y, h)`` gives the time derivatives of the ``n_hist`` running
    history integrals ``h`` (all zero at t=0) and ``value(t, y, h)`` evaluates
    ``F̄`` from the current value and the accumulated history.
    """

    n_hist: int
    rates: Callable[[float, float, np.ndarray], np.ndarray]
    value: Callable[[float, float, np.ndarray], float]


def constant_functional(c: float) -> HistoryFunctional:
    return HistoryFunctional(0, lambda t, y, h: np.empty(0), lambda t, y, h: c)


def boussinesq_functional(mc: ModelConstants) -> HistoryFunctional:
    cap = mc.exp_cap

    def rates(t, y, h):
        if h[0] > cap:
            raise BoundOverflowError(f"history exponent {h[0]:.6g} exceeds cap")
        return np.array([y, math.exp(h[0])])

    def value(t, y, h):
        return h[1] + math.exp(h[0]) / (1.0 + _log_principal(y, cap))

    return HistoryFunctional(2, rates, value)


def nh_euler_functional(mc: ModelConstants, z_front: float = 1.0) -> HistoryFunctional:
    c, eps, cap = mc.c_const, mc.epsilon, mc.exp_cap

    def rates(t, y, h):
        ca = c * h[0]
        if 9.0 * (ca + math.log(z_front)) > cap:
            raise BoundOverflowError("history exponent exceeds cap")
        z3 = (z_front * math.exp(ca)) ** 3
        ym1 = y - 1.0
        return np.array([ym1, z3 * ym1 * (1.0 + ym1 + eps * eps * z3 * z3)])

    def value(t, y, h):
        ly = _log_principal(y, cap)
        eca = math.exp(c * h[0])
        hh = (1.0 + ly) * eca + y * ly * h[1] + eps * ly * h[1] * eca
        return hh / (1.0 + ly)

    return HistoryFunctional(2, rates, value)


def log_growth(c_const: float) -> Callable[[float], float]:
    """``G(y) = C y (1 + log y)``, the tame part of both bound equations."""
    return lambda y: c_const * y * (1.0 + math.log(y))


def solve_abstract(g: Callable[[float], float], f_bar: HistoryFunctional, y0: float,
                   mc: ModelConstants, rel_tol: float = 1e-10, abs_tol: float = 1e-12,
                   *, t_eval=None) -> Trajectory:
    """Integrate ``y' = G(y) [1 + ε F̄(t, y)]`` over ``[0, mc.horizon]``.

    ``g`` must be positive and continuous on ``[y0, ∞)`` and ``f_bar``
    non-decreasing in the history; neither is checked.
    """
    eps = mc.epsilon
    n = f_bar.n_hist

    def fun(t, state):
        y, h = state[0], state[1:]
        try:
            dy = g(y) * (1.0 + eps * f_bar.value(t, y, h))
            rates = f_bar.rates(t, y, h)
        except (OverflowError, ValueError) as exc:
            raise BoundOverflowError(str(exc)) from exc
        out = np.empty(n + 1)
        out[0] = dy
        out[1:] = rates
        return out

    try:
        ts, ys = dopri5(fun, mc.horizon, np.r_[y0, np.zeros(n)],
                        rtol=rel_tol, atol=abs_tol, t_eval=t_eval)
    except BlowUpError as exc:
        ts, ys = exc.trajectory
        exc.trajectory = Trajectory(ts, ys[:, 0], label="abstract")
        raise
    return Trajectory(ts, ys[:, 0], label="abstract")
