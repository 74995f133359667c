"""Pseudo-spectral RK4 time stepping for the two systems.

Boussinesq (vorticity form)::

    ∂t ω + u·∇ω = ε ∂₁φ,      ∂t φ + u·∇φ = 0

Density-dependent Euler with η = 1/(1 + εφ) − 1::

    ∂t ϖ + v·∇ϖ = −∇⊥η·∇p,   ∂t φ + v·∇φ = 0,   dV/dt = −⟨η ∇p⟩
    −div((1 + η)∇p) = div(v·∇v)

Products are formed on the grid and truncated with the 2/3 rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import CFLViolation, NoConvergenceError
from .fields import FlowField, SimConfig, velocity_from_vorticity
from .grid import Grid2D
from .norms import spectral_extrema


@dataclass
class PressureSolution:
    p_hat: np.ndarray
    iterations: int
    residual: float
    eta_ref: float


@dataclass
class StepStats:
    """Running record of solver-side quantities; also carries the pressure warm start."""

    p_hat: np.ndarray | None = None
    pressure_solves: int = 0
    max_pressure_iterations: int = 0
    max_pressure_residual: float = 0.0
    inv_rho_min: float = math.inf
    inv_rho_max: float = -math.inf
    max_cfl: float = 0.0
    hook: Callable[[str, object], None] | None = field(default=None, repr=False)


def _velocity(omega_hat, mean_velocity, g: Grid2D):
    return velocity_from_vorticity(FlowField(omega_hat, omega_hat, 0.0, mean_velocity), g)


def _advect(u1, u2, f_hat, g: Grid2D) -> np.ndarray:
    return u1 * g.deriv(f_hat, 0) + u2 * g.deriv(f_hat, 1)


def _div_hat(a1, a2, g: Grid2D) -> np.ndarray:
    k1, k2 = g.wavenumbers
    return g.dealias * (1j * k1 * g.fft(a1) + 1j * k2 * g.fft(a2))


def cfl_number(f: FlowField, cfg: SimConfig) -> float:
    g = cfg.grid
    u1h, u2h = velocity_from_vorticity(f, g)
    speed = np.sqrt(g.ifft(u1h) ** 2 + g.ifft(u2h) ** 2)
    return float(cfg.dt * speed.max() / g.dx)


def _check_cfl(f: FlowField, cfg: SimConfig, stats: StepStats | None) -> None:
    cfl = cfl_number(f, cfg)
    if stats is not None:
        stats.max_cfl = max(stats.max_cfl, cfl)
    if cfl > cfg.cfl_max:
        raise CFLViolation(f"CFL number {cfl:.3f} exceeds {cfg.cfl_max} at t={f.time:.6g}",
                           time=f.time)


def pressure_source(u1_hat, u2_hat, g: Grid2D) -> np.ndarray:
    """Spectral ``div(v·∇v)`` (dealiased)."""
    u1, u2 = g.ifft(u1_hat), g.ifft(u2_hat)
    a1 = u1 * g.deriv(u1_hat, 0) + u2 * g.deriv(u1_hat, 1)
    a2 = u1 * g.deriv(u2_hat, 0) + u2 * g.deriv(u2_hat, 1)
    return _div_hat(a1, a2, g)


def pressure_solve(v, eta: np.ndarray, cfg: SimConfig, p_guess: np.ndarray | None = None,
                   time: float | None = None) -> PressureSolution:
    """Solve ``-div((1 + η)∇p) = div(v·∇v)`` with zero-mean gauge.

    ``v`` is the spectral velocity pair, ``eta`` the physical field 1/ρ − 1.
    Fixed-point iteration with the constant part of the coefficient moved to
    the left: ``(1 + η̄)Δp⁺ = −div(v·∇v) − div((η − η̄)∇p)``, with η̄ the
    mid-range of η. Stops when the sup-norm change drops below
    ``cfg.pressure_tol``; ``residual`` is the sup norm of the residual of the
    original equation.
    """
    g = cfg.grid
    source = pressure_source(v[0], v[1], g)
    eta_ref = 0.5 * (float(eta.max()) + float(eta.min()))
    delta = eta - eta_ref
    coef = 1.0 + eta_ref
    varying = bool(np.any(delta != 0.0))
    k1, k2 = g.wavenumbers

    def correction(p_hat):
        if not varying:
            return np.zeros_like(p_hat)
        return _div_hat(delta * g.deriv(p_hat, 0), delta * g.deriv(p_hat, 1), g)

    p_hat = np.zeros_like(source) if p_guess is None else p_guess.copy()
    diff = math.inf
    for it in range(1, cfg.pressure_max_iter + 1):
        new = (source + correction(p_hat)) * g.inv_ksq / coef
        new[0, 0] = 0.0
        diff = float(np.max(np.abs(g.ifft(new - p_hat))))
        p_hat = new
        if diff < cfg.pressure_tol or not varying:
            break
    else:
        raise NoConvergenceError(f"pressure iteration did not converge in {cfg.pressure_max_iter} "
                                 f"iterations (last change {diff:.3e})",
                                 cfg.pressure_max_iter, diff, time)
    flux1 = (1.0 + eta) * g.deriv(p_hat, 0)
    flux2 = (1.0 + eta) * g.deriv(p_hat, 1)
    residual_hat = -_div_hat(flux1, flux2, g) - source
    residual = float(np.max(np.abs(g.ifft(residual_hat))))
    return PressureSolution(p_hat, it, residual, eta_ref)


def boussinesq_rhs(omega_hat, phi_hat, mean_velocity, cfg: SimConfig, stats=None):
    g = cfg.grid
    u1h, u2h = _velocity(omega_hat, mean_velocity, g)
    u1, u2 = g.ifft(u1h), g.ifft(u2h)
    k1 = g.wavenumbers[0]
    d_omega = g.dealias * (-g.fft(_advect(u1, u2, omega_hat, g)) + cfg.epsilon * 1j * k1 * phi_hat)
    d_phi = -(g.dealias * g.fft(_advect(u1, u2, phi_hat, g)))
    d_omega[0, 0] = 0.0
    return d_omega, d_phi, np.zeros(2)


def nh_euler_rhs(omega_hat, phi_hat, mean_velocity, cfg: SimConfig, stats: StepStats | None = None):
    g = cfg.grid
    u1h, u2h = _velocity(omega_hat, mean_velocity, g)
    u1, u2 = g.ifft(u1h), g.ifft(u2h)
    phi = g.ifft(phi_hat)
    inv_rho = 1.0 / (1.0 + cfg.epsilon * phi)
    eta = inv_rho - 1.0
    press = pressure_solve((u1h, u2h), eta, cfg, None if stats is None else stats.p_hat)
    if stats is not None:
        stats.p_hat = press.p_hat
        stats.pressure_solves += 1
        stats.max_pressure_iterations = max(stats.max_pressure_iterations, press.iterations)
        stats.max_pressure_residual = max(stats.max_pressure_residual, press.residual)
        stats.inv_rho_min = min(stats.inv_rho_min, float(inv_rho.min()))
        stats.inv_rho_max = max(stats.inv_rho_max, float(inv_rho.max()))
        if stats.hook is not None:
            stats.hook("pressure", press)
    p1, p2 = g.deriv(press.p_hat, 0), g.deriv(press.p_hat, 1)
    eta_hat = g.fft(eta)
    e1, e2 = g.deriv(eta_hat, 0), g.deriv(eta_hat, 1)
    baroclinic = e2 * p1 - e1 * p2
    d_omega = g.dealias * g.fft(baroclinic - _advect(u1, u2, omega_hat, g))
    d_phi = -(g.dealias * g.fft(_advect(u1, u2, phi_hat, g)))
    d_omega[0, 0] = 0.0
    d_mean = -np.array([np.mean(eta * p1), np.mean(eta * p2)])
    return d_omega, d_phi, d_mean


def _rk4(f: FlowField, cfg: SimConfig, rhs, stats) -> FlowField:
    dt = cfg.dt
    w0, p0, m0 = f.omega_hat, f.phi_hat, np.asarray(f.mean_velocity, dtype=float)
    k1 = rhs(w0, p0, tuple(m0), cfg, stats)
    k2 = rhs(w0 + 0.5 * dt * k1[0], p0 + 0.5 * dt * k1[1], tuple(m0 + 0.5 * dt * k1[2]), cfg, stats)
    k3 = rhs(w0 + 0.5 * dt * k2[0], p0 + 0.5 * dt * k2[1], tuple(m0 + 0.5 * dt * k2[2]), cfg, stats)
    k4 = rhs(w0 + dt * k3[0], p0 + dt * k3[1], tuple(m0 + dt * k3[2]), cfg, stats)
    w = w0 + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    p = p0 + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    m = m0 + dt / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
    return FlowField(w, p, f.time + dt, (float(m[0]), float(m[1])))


def step_boussinesq(f: FlowField, cfg: SimConfig, stats: StepStats | None = None) -> FlowField:
    """One RK4 step of the Boussinesq vorticity/temperature system."""
    _check_cfl(f, cfg, stats)
    return _rk4(f, cfg, boussinesq_rhs, stats)


def step_nh_euler(f: FlowField, cfg: SimConfig, stats: StepStats | None = None) -> FlowField:
    """One RK4 step of the density-dependent Euler system (pressure solved every stage)."""
    _check_cfl(f, cfg, stats)
    if stats is None:
        stats = StepStats()
    return _rk4(f, cfg, nh_euler_rhs, stats)


def admissible_epsilon(phi_hat: np.ndarray, g: Grid2D) -> float:
    """Largest ε allowed for density data φ0: ``min{1, 1/(2 max φ0)}``."""
    phi_max, _ = spectral_extrema(phi_hat, g)
    return 1.0 if phi_max <= 0 else min(1.0, 1.0 / (2.0 * phi_max))
