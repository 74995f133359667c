"""Pseudo-spectral solvers on the 2π-periodic torus and Sobolev diagnostics."""

from .diagnostics import (
    CSV_COLUMNS,
    AprioriReport,
    DiagnosticsRecord,
    FittedConstant,
    diagnostics,
    read_series,
    verify_apriori,
    write_series,
)
from .fields import (
    FlowField,
    InitSpec,
    SimConfig,
    init_fields,
    init_from_spec,
    resample_field,
    resample_spectrum,
    velocity_from_vorticity,
)
from .grid import Grid2D
from .io import read_snapshot, write_snapshot
from .norms import hermitian_defect, l2_norm, sobolev_norm, spectral_extrema
from .simulate import SimulationResult, simulate
from .solver import (
    PressureSolution,
    StepStats,
    admissible_epsilon,
    cfl_number,
    pressure_solve,
    step_boussinesq,
    step_nh_euler,
)

__all__ = [
    "CSV_COLUMNS", "AprioriReport", "DiagnosticsRecord", "FittedConstant", "FlowField", "Grid2D",
    "InitSpec", "PressureSolution", "SimConfig", "SimulationResult", "StepStats",
    "admissible_epsilon", "cfl_number", "diagnostics", "hermitian_defect", "init_fields",
    "init_from_spec", "l2_norm", "resample_field", "resample_spectrum", "pressure_solve", "read_series", "read_snapshot", "simulate",
    "sobolev_norm", "spectral_extrema", "step_boussinesq", "step_nh_euler", "verify_apriori",
    "velocity_from_vorticity", "write_series", "write_snapshot",
]
