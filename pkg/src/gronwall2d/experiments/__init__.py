"""Sweeps, cross-validation and simulation-vs-bound reports with run manifests."""

from .core import (
    SWEEP_VARIABLES,
    CrossvalReport,
    SimVsBoundReport,
    SweepSpec,
    SweepTable,
    crossval_bounds,
    fit_c,
    run_sweep,
    sim_vs_bound,
    sweep_thresholds,
    triple_log,
    write_sim_vs_bound,
)
from .manifest import RunManifest, config_hash

__all__ = [
    "SWEEP_VARIABLES", "CrossvalReport", "RunManifest", "SimVsBoundReport", "SweepSpec",
    "SweepTable", "config_hash", "crossval_bounds", "fit_c", "run_sweep",
    "sim_vs_bound", "sweep_thresholds", "triple_log", "write_sim_vs_bound",
]
