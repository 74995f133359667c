"""Sweeps and end-to-end checks built on the bound engine and the simulator."""

from __future__ import annotations

import csv
import json
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from ..bound_engine import (
    ModelConstants,
    ThresholdReport,
    Trajectory,
    comparison_verify,
    integrate_bound,
    picard_solve,
    predict_horizon,
    thresholds,
    w_to_z,
)
from ..bound_engine.comparison import ComparisonReport
from ..errors import BlowUpError, BoundOverflowError, NoConvergenceError, RegimeWarning
from ..spectral2d import InitSpec, SimConfig, init_from_spec, simulate, write_series
from ..spectral2d.diagnostics import DiagnosticsRecord
from .manifest import RunManifest

TRIPLE_LOG_LIMIT = math.exp(-math.e)
SWEEP_VARIABLES = ("epsilon", "horizon", "m_tilde", "grid_n")
CALIBRATION_MODES = ("t0", "sup")

DEFAULT_BASE = {
    "c_const": 1.0,
    "horizon": 1.0,
    "epsilon": 0.0,
    "b_const": math.exp(-1.0),
    "m_tilde": 1.0,
    "w0": 2.0,
    "grid_n": 1000,
    "tol": 1e-10,
    "t_cap": 10.0,
}


def default_workers() -> int:
    return max(1, int(os.environ.get("GRONWALL2D_WORKERS", "1")))


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple
    base: dict = field(default_factory=dict)
    outputs: Path | None = None

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"sweep variable must be one of {SWEEP_VARIABLES}")
        vals = np.asarray(self.values, dtype=float)
        if vals.size == 0:
            raise ValueError("sweep values must be non-empty")
        d = np.diff(vals)
        if vals.size > 1 and not (np.all(d > 0) or np.all(d < 0)):
            raise ValueError("sweep values must be strictly monotone")
        unknown = set(self.base) - set(DEFAULT_BASE)
        if unknown:
            raise ValueError(f"unknown base parameters: {sorted(unknown)}")
        object.__setattr__(self, "values", tuple(self.values))

    def params(self) -> dict:
        return {**DEFAULT_BASE, **self.base}


@dataclass
class SweepTable:
    variable: str
    columns: list[str]
    rows: list[list[float]]
    regression: dict | None = None

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.columns)
            for row in self.rows:
                writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
        return path


def triple_log(eps: float) -> float:
    """``log log log(1/ε)``, defined for ``ε < e^{-e}``."""
    return math.log(math.log(-math.log(eps)))


def _triple_log_regression(t_vals: Sequence[float], log_eps: Sequence[float]) -> dict | None:
    pts = [(math.log(math.log(-le)), t) for t, le in zip(t_vals, log_eps)
           if le < -math.e and math.isfinite(t)]
    if len(pts) < 2:
        return None
    x, y = np.array(pts).T
    slope, intercept = np.polyfit(x, y, 1)
    return {"slope": float(slope), "intercept": float(intercept), "points": len(pts),
            "domain": "epsilon < exp(-e)"}


def _sweep_point(variable: str, value: float, p: dict) -> list:
    c, b = p["c_const"], p["b_const"]
    if variable == "epsilon":
        return [value, predict_horizon(value, p["m_tilde"], c, b_const=b, t_cap=p["t_cap"])]
    if variable in ("horizon", "m_tilde"):
        t = value if variable == "horizon" else p["horizon"]
        m_tilde = value if variable == "m_tilde" else p["m_tilde"]
        r = thresholds(m_tilde, ModelConstants(c, t, b_const=b))
        return [value, r.eps0, r.log_eps0, r.log_eps1, r.log_eps2, r.lipschitz_log,
                int(r.overflow_flag)]
    mc = ModelConstants(c, p["horizon"], p["epsilon"], b)
    rep = crossval_bounds(mc, p["w0"], int(value), p["tol"])
    return [int(value), rep.discrepancy, rep.contraction_estimate, rep.iterations,
            int(rep.contractive)]


_COLUMNS = {
    "epsilon": ["epsilon", "horizon"],
    "horizon": ["horizon", "eps0", "log_eps0", "log_eps1", "log_eps2", "lipschitz_log", "overflow"],
    "m_tilde": ["m_tilde", "eps0", "log_eps0", "log_eps1", "log_eps2", "lipschitz_log", "overflow"],
    "grid_n": ["grid_n", "discrepancy", "contraction_estimate", "iterations", "contractive"],
}


def _map(fn, args: list[tuple], workers: int) -> list:
    if workers <= 1 or len(args) <= 1:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # results come back in input order regardless of completion order
        return list(pool.map(fn, *zip(*args)))


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepTable:
    """Evaluate every sweep point; writes ``summary.csv`` when ``spec.outputs`` is set."""
    p = spec.params()
    workers = default_workers() if workers is None else workers
    rows = _map(_sweep_point, [(spec.variable, v, p) for v in spec.values], workers)
    table = SweepTable(spec.variable, list(_COLUMNS[spec.variable]), rows)
    if len(rows) > 1:
        if spec.variable == "epsilon":
            table.regression = _triple_log_regression(
                table.column("horizon"), np.log(table.column("epsilon")))
        elif spec.variable == "horizon":
            table.regression = _triple_log_regression(
                table.column("horizon"), table.column("log_eps0"))
    if spec.outputs is not None:
        out = Path(spec.outputs)
        out.mkdir(parents=True, exist_ok=True)
        table.to_csv(out / "summary.csv")
        if table.regression is not None:
            (out / "regression.json").write_text(
                json.dumps(table.regression, indent=2, sort_keys=True) + "\n")
    return table


def sweep_thresholds(spec: SweepSpec, workers: int | None = None) -> SweepTable:
    """(ε, T(ε)) or (T, ε₀(T)) pairs plus the triple-log regression."""
    if spec.variable not in ("epsilon", "horizon"):
        raise ValueError("sweep_thresholds needs variable 'epsilon' or 'horizon'")
    return run_sweep(spec, workers)


@dataclass
class CrossvalReport:
    discrepancy: float
    contraction_estimate: float
    iterations: int
    in_regime: bool
    contractive: bool
    z_ode: Trajectory
    z_picard: Trajectory | None
    picard_error: str | None = None


def crossval_bounds(mc: ModelConstants, w0: float, grid_n: int = 1000, tol: float = 1e-10,
                    max_iter: int = 200) -> CrossvalReport:
    """Picard fixed point vs augmented ODE, compared in z-space on the Picard grid.

    Outside the contraction regime the Picard result is flagged (or absent if
    the iteration fails) while the ODE trajectory is still returned.
    """
    z0 = math.exp(w0 - 1.0)
    grid = np.linspace(0.0, mc.horizon, grid_n + 1)
    z_ode = integrate_bound("boussinesq", z0, mc, 1e-12, 1e-14, t_eval=grid)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RegimeWarning)
        try:
            res = picard_solve(w0, mc, grid_n, tol, max_iter)
        except (NoConvergenceError, BoundOverflowError) as exc:
            return CrossvalReport(math.inf, math.inf, max_iter, False, False, z_ode, None, str(exc))
    in_regime = not any(issubclass(w.category, RegimeWarning) for w in caught)
    z_pic = w_to_z(res.trajectory, mc.c_const)
    disc = float(np.max(np.abs(z_pic.values - z_ode.values) / np.abs(z_ode.values)))
    contractive = in_regime and res.contraction_estimate < 1.0
    return CrossvalReport(disc, res.contraction_estimate, res.iterations, in_regime,
                          contractive, z_ode, z_pic)


@dataclass
class SimVsBoundReport:
    comparison: ComparisonReport
    c_used: float
    c_fitted: float
    calibrated: bool
    z0: float
    y: Trajectory
    z: Trajectory
    thresholds: ThresholdReport | None
    history: list[DiagnosticsRecord]
    flags: list[str] = field(default_factory=list)
    blowup_time: float | None = None

    @property
    def holds(self) -> bool:
        return self.comparison.holds

    def summary(self) -> dict:
        return {
            "holds": self.comparison.holds,
            "first_crossing": self.comparison.first_crossing,
            "c_used": self.c_used,
            "c_fitted": self.c_fitted,
            "calibrated": self.calibrated,
            "z0": self.z0,
            "flags": list(self.flags),
            "blowup_time": self.blowup_time,
        }


def _growth_factor(times: np.ndarray, y: np.ndarray, c: float, epsilon: float,
                   system: str, cap: float) -> np.ndarray:
    """Bound-equation right-hand side divided by C, evaluated on sampled data.

    History integrals are cumulative trapezoid sums over the samples.
    """
    logy = np.log(np.maximum(y, 1.0))
    if system == "boussinesq":
        a = cumulative_trapezoid(y, times, initial=0.0)
        if a[-1] > cap:
            raise BoundOverflowError(f"history exponent A={a[-1]:.6g} exceeds cap {cap}")
        ea = np.exp(a)
        b = cumulative_trapezoid(ea, times, initial=0.0)
        return y * ((1.0 + logy) * (1.0 + epsilon * b) + epsilon * ea)
    ym1 = y - 1.0
    ca = c * cumulative_trapezoid(ym1, times, initial=0.0)
    if 9.0 * ca[-1] > cap:
        raise BoundOverflowError(f"history exponent C*A={ca[-1]:.6g} exceeds cap {cap}/9")
    eca = np.exp(ca)
    z3 = eca ** 3
    i2 = cumulative_trapezoid(z3 * ym1 * (1.0 + ym1 + epsilon ** 2 * z3 * z3), times, initial=0.0)
    h = (1.0 + logy) * eca + y * logy * i2 + epsilon * logy * i2 * eca
    return y * (1.0 + logy + epsilon * h)


def fit_c(times: np.ndarray, y: np.ndarray, epsilon: float, system: str,
          cap: float = 700.0, mode: str = "t0") -> float:
    """Fit the generic constant C of the bound equation to sampled data.

    ``G`` is the bound-equation right-hand side over C, built from the
    sampled history; ``y'`` is the second-order finite difference.

    * ``mode="t0"``: equality ``y'(0) = C G(0)`` at the initial time, where
      the history integrals vanish;
    * ``mode="sup"``: smallest C with ``y'(t) <= C G(t)`` at every sample.
      For nh_euler ``G`` grows with C, so this is found by bisection.
    """
    if mode not in CALIBRATION_MODES:
        raise ValueError(f"calibration mode must be one of {CALIBRATION_MODES}")
    times = np.asarray(times, dtype=float)
    y = np.asarray(y, dtype=float)
    if times.size < 3:
        raise ValueError("need at least three samples to fit C")
    dy = np.gradient(y, times, edge_order=2)
    if mode == "t0":
        return float(dy[0] / _growth_factor(times[:1], y[:1], 0.0, epsilon, system, cap)[0])
    c_hi = float(np.max(dy / _growth_factor(times, y, 0.0, epsilon, system, cap)))
    if system == "boussinesq" or c_hi <= 0:
        return c_hi
    lo, hi = 0.0, c_hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.all(dy <= mid * _growth_factor(times, y, mid, epsilon, system, cap)):
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-14 * hi:
            break
    return hi


def sim_vs_bound(sim_cfg: SimConfig, mc: ModelConstants, calibrate_c: bool = True,
                 init: InitSpec | None = None, *, sample_every: int = 1,
                 z0_offset: float = 1.0, c_floor: float = 1e-12,
                 calibration: str = "t0") -> SimVsBoundReport:
    """Simulate, integrate the bound equation from ``z0 = y(0) + z0_offset`` and compare.

    ``y`` is the continuation norm (Boussinesq) or ``Υ = ‖v‖_{H³} + 1``
    (nh_euler). The bound uses ``sim_cfg.epsilon`` and ``sim_cfg.t_end``;
    from ``mc`` it takes ``c_const`` (unless calibrated), ``b_const`` and
    ``exp_cap``. A calibrated C is the :func:`fit_c` value for
    ``calibration`` ("t0" or "sup"); a non-positive fit is replaced by
    ``c_floor`` and flagged. An uncalibrated C below the fit is flagged.
    """
    init = init or InitSpec()
    f0 = init_from_spec(init, sim_cfg.grid, sim_cfg.seed)
    sim = simulate(sim_cfg, f0, sample_every=sample_every)
    times = np.array([r.t for r in sim.history])
    y = np.array([r.y_norm for r in sim.history])
    if sim_cfg.system == "nh_euler":
        y = y + 1.0
    y_traj = Trajectory(times, y, label="y")

    flags: list[str] = []
    c_fit = fit_c(times, y, sim_cfg.epsilon, sim_cfg.system, mc.exp_cap, calibration)
    if calibrate_c:
        c_used = c_fit
        if c_used <= 0:
            flags.append(f"fitted C={c_fit:.3e} is not positive; using floor {c_floor:g}")
            c_used = c_floor
    else:
        c_used = mc.c_const
        if c_used < c_fit:
            flags.append(f"uncalibrated C={c_used:.3e} is below the fitted {c_fit:.3e}")

    z0 = float(y[0] + z0_offset)
    mc_z = ModelConstants(c_used, sim_cfg.t_end, min(sim_cfg.epsilon, 1.0), mc.b_const, mc.exp_cap)
    blowup = None
    try:
        z_traj = integrate_bound(sim_cfg.system, z0, mc_z, 1e-10, 1e-12, t_eval=times)
    except BlowUpError as exc:
        blowup = float(exc.time)
        z_traj = exc.trajectory
        flags.append(f"bound equation blew up at t={exc.time:.6g}")
    comparison = comparison_verify(y_traj, z_traj)
    report = None
    if c_used > 0 and sim_cfg.t_end > 0:
        report = thresholds(1.0 + math.log(z0), mc_z)
    return SimVsBoundReport(comparison, c_used, c_fit, calibrate_c, z0, y_traj, z_traj,
                            report, sim.history, flags, blowup)


def write_sim_vs_bound(report: SimVsBoundReport, run_dir, config: dict, seed: int) -> Path:
    """Write ``series.csv``, ``comparison.csv``, ``thresholds.json`` and ``manifest.json``."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(config=config, seed=seed)
    write_series(report.history, run_dir / "series.csv")
    with (run_dir / "comparison.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "y", "z", "y_minus_z"])
        cmp_ = report.comparison
        for t, a, b in zip(cmp_.times, cmp_.y, cmp_.z):
            writer.writerow([repr(float(t)), repr(float(a)), repr(float(b)), repr(float(a - b))])
    manifest.outputs = {"series": "series.csv", "comparison": "comparison.csv"}
    if report.thresholds is not None:
        report.thresholds.to_json(run_dir / "thresholds.json")
        manifest.outputs["thresholds"] = "thresholds.json"
    (run_dir / "verdict.json").write_text(json.dumps(report.summary(), indent=2, sort_keys=True) + "\n")
    manifest.outputs["verdict"] = "verdict.json"
    manifest.checks = {"comparison_holds": report.holds, "calibrated": report.calibrated,
                       "no_blowup": report.blowup_time is None}
    return manifest.finish(run_dir)

