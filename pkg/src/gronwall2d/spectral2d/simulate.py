from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

from .diagnostics import DiagnosticsRecord, diagnostics
from .fields import FlowField, SimConfig
from .solver import StepStats, admissible_epsilon, step_boussinesq, step_nh_euler

log = logging.getLogger(__name__)


@dataclass
class SimulationResult:
    history: list[DiagnosticsRecord]
    final: FlowField
    stats: StepStats
    steps: int = 0
    invariant_failures: list[str] = field(default_factory=list)


def simulate(cfg: SimConfig, f0: FlowField, *, sample_every: int = 1,
             check_invariants: bool = False,
             on_step: Callable[[int, FlowField], None] | None = None) -> SimulationResult:
    """Advance ``f0`` to ``cfg.t_end`` with fixed steps, sampling diagnostics.

    Diagnostics are taken at t=0, every ``sample_every`` steps and at the
    final time. For nh_euler the admissibility bound on ε is enforced first.
    """
    steps = cfg.n_steps
    if abs(steps * cfg.dt - cfg.t_end) > 1e-9 * max(cfg.t_end, 1.0):
        raise ValueError(f"t_end={cfg.t_end} is not a multiple of dt={cfg.dt}")
    if cfg.system == "nh_euler":
        eps_max = admissible_epsilon(f0.phi_hat, cfg.grid)
        if cfg.epsilon > eps_max * (1 + 1e-12):
            raise ValueError(f"epsilon={cfg.epsilon} exceeds min(1, 1/(2 max phi0))={eps_max:.6g}")
    step = step_boussinesq if cfg.system == "boussinesq" else step_nh_euler
    stats = StepStats()
    result = SimulationResult([diagnostics(f0, cfg)], f0, stats)
    f = f0
    for i in range(1, steps + 1):
        f = step(f, cfg, stats)
        # avoid accumulating round-off in the clock
        f = FlowField(f.omega_hat, f.phi_hat, i * cfg.dt, f.mean_velocity)
        if check_invariants:
            try:
                f.check()
            except AssertionError as exc:
                result.invariant_failures.append(f"t={f.time:.6g}: {exc}")
        if on_step is not None:
            on_step(i, f)
        if i % sample_every == 0 or i == steps:
            result.history.append(diagnostics(f, cfg))
    result.final = f
    result.steps = steps
    log.debug("simulated %d steps of %s to t=%g", steps, cfg.system, f.time)
    return result
