"""History-dependent bound equations: augmented ODE and Picard solvers,
log-domain smallness thresholds and the comparison check."""

from .augmented import (
    AugmentedStateBoussinesq,
    AugmentedStateNhEuler,
    HistoryFunctional,
    boussinesq_functional,
    closed_form_eps0,
    constant_functional,
    integrate_augmented,
    integrate_bound,
    log_growth,
    nh_euler_functional,
    rhs_boussinesq_augmented,
    rhs_nheuler_augmented,
    solve_abstract,
)
from .comparison import ComparisonReport, comparison_verify
from .picard import PicardResult, eval_F_boussinesq, picard_map, picard_solve, w_to_z, z_to_w
from .thresholds import ThresholdReport, predict_horizon, thresholds
from .types import ModelConstants, Trajectory

__all__ = [
    "AugmentedStateBoussinesq", "AugmentedStateNhEuler", "ComparisonReport",
    "HistoryFunctional", "ModelConstants", "PicardResult", "ThresholdReport", "Trajectory",
    "boussinesq_functional", "closed_form_eps0", "comparison_verify", "constant_functional",
    "eval_F_boussinesq", "integrate_augmented", "integrate_bound", "log_growth",
    "nh_euler_functional", "picard_map", "picard_solve", "predict_horizon",
    "rhs_boussinesq_augmented", "rhs_nheuler_augmented", "solve_abstract", "thresholds",
    "w_to_z", "z_to_w",
]
