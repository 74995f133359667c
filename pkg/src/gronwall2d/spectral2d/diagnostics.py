from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .fields import FlowField, SimConfig, velocity_from_vorticity
from .norms import l2_norm, sobolev_norm, spectral_extrema

CSV_COLUMNS = ("t", "u_h3", "phi_h3", "y_norm", "kinetic", "omega_linf", "omega_l2",
               "phi_max", "phi_min", "grad_u_linf")


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    u_h3: float
    phi_h3: float
    y_norm: float
    kinetic: float
    omega_linf: float
    omega_l2: float
    phi_max: float
    phi_min: float
    grad_u_linf: float
    # not part of the CSV layout; used by the a-priori checks
    phi_l2: float = 0.0
    grad_phi_l2: float = 0.0
    grad_phi_linf: float = 0.0

    def row(self) -> list[float]:
        return [getattr(self, c) for c in CSV_COLUMNS]


def diagnostics(f: FlowField, cfg: SimConfig) -> DiagnosticsRecord:
    """Norms of the current state.

    L∞ quantities are grid maxima except ``phi_max``/``phi_min``, which are
    refined on the trigonometric interpolant. ``kinetic`` is ``‖√ρ v‖_{L²}``
    for nh_euler and ``‖u‖_{L²}`` for Boussinesq; ``y_norm`` is
    ``‖u‖_{H³} + ε‖φ‖_{H³}`` (Boussinesq) or ``‖v‖_{H³}`` (nh_euler).
    """
    g = cfg.grid
    u1h, u2h = velocity_from_vorticity(f, g)
    u1, u2 = g.ifft(u1h), g.ifft(u2h)
    omega = g.ifft(f.omega_hat)
    phi = g.ifft(f.phi_hat)

    u_h3 = math.hypot(sobolev_norm(u1h, 3, g), sobolev_norm(u2h, 3, g))
    phi_h3 = sobolev_norm(f.phi_hat, 3, g)
    if cfg.system == "boussinesq":
        y_norm = u_h3 + cfg.epsilon * phi_h3
        kinetic = math.hypot(sobolev_norm(u1h, 0, g), sobolev_norm(u2h, 0, g))
    else:
        y_norm = u_h3
        rho = 1.0 + cfg.epsilon * phi
        kinetic = math.sqrt(float(np.sum(rho * (u1 * u1 + u2 * u2))) * g.cell_area)

    jac = [g.deriv(uh, a) for uh in (u1h, u2h) for a in (0, 1)]
    grad_u_linf = max(float(np.max(np.abs(j))) for j in jac)
    phi_x, phi_y = g.deriv(f.phi_hat, 0), g.deriv(f.phi_hat, 1)
    phi_max, phi_min = spectral_extrema(f.phi_hat, g)
    return DiagnosticsRecord(
        t=f.time,
        u_h3=u_h3,
        phi_h3=phi_h3,
        y_norm=y_norm,
        kinetic=kinetic,
        omega_linf=float(np.max(np.abs(omega))),
        omega_l2=sobolev_norm(f.omega_hat, 0, g),
        phi_max=phi_max,
        phi_min=phi_min,
        grad_u_linf=grad_u_linf,
        phi_l2=sobolev_norm(f.phi_hat, 0, g),
        grad_phi_l2=l2_norm(np.hypot(phi_x, phi_y), g),
        grad_phi_linf=float(np.max(np.hypot(phi_x, phi_y))),
    )


def write_series(records: Sequence[DiagnosticsRecord], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow([repr(float(v)) for v in r.row()])
    return path


def read_series(path) -> list[DiagnosticsRecord]:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"unexpected series header {reader.fieldnames}")
        return [DiagnosticsRecord(**{k: float(v) for k, v in row.items()}) for row in reader]


@dataclass(frozen=True)
class FittedConstant:
    """Smallest constant making an estimate hold at every sample.

    ``value`` is ``inf`` when the estimate is violated where its right-hand
    side vanishes (a structural failure rather than a large constant).
    """

    name: str
    value: float
    worst_time: float | None

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)


@dataclass(frozen=True)
class AprioriReport:
    constants: dict[str, FittedConstant] = field(default_factory=dict)

    @property
    def all_finite(self) -> bool:
        return all(c.finite for c in self.constants.values())

    def __getitem__(self, name: str) -> FittedConstant:
        return self.constants[name]

    def as_dict(self) -> dict:
        return {k: asdict(v) for k, v in self.constants.items()}


def _fit(name: str, t: np.ndarray, lhs: np.ndarray, rhs: np.ndarray, slack: float) -> FittedConstant:
    """Smallest C >= 0 with ``lhs <= C * rhs`` (``lhs <= slack`` where ``rhs == 0``)."""
    worst, worst_t = 0.0, None
    for ti, a, b in zip(t, lhs, rhs):
        if b > 0:
            ratio = a / b
        elif a > slack:
            return FittedConstant(name, math.inf, float(ti))
        else:
            continue
        if ratio > worst:
            worst, worst_t = ratio, float(ti)
    return FittedConstant(name, worst, worst_t)


def _cumtrapz(y: np.ndarray, t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(t))
    return out


def verify_apriori(history: Sequence[DiagnosticsRecord], cfg: SimConfig,
                   rel_slack: float = 1e-9) -> AprioriReport:
    """Fit the constants of the a-priori estimates along a simulated run.

    * ``energy``: dy/dt <= C (1 + ‖Du‖∞ + ε‖∇φ‖∞) y (centred differences);
    * ``potential``: ‖Du‖∞ <= C [1 + (1 + log⁺‖u‖_{H³}) ‖ω‖∞ + ‖ω‖_{L²}];
    * ``vorticity_l2``: ‖ω(t)‖_{L²} - ‖ω0‖_{L²} <= C ε ∫‖∇φ‖_{L²};
    * ``gradient_l2`` / ``gradient_linf``: ‖∇φ‖_{Lp} <= C ‖∇φ0‖_{Lp} exp(∫‖Du‖∞)
      (C <= 1 expected);
    * ``kozono_taniuchi``: ‖Du‖∞ <= C [1 + log(1 + ‖u‖_{H³}) ‖ω‖∞].
    """
    if not history:
        raise ValueError("empty history")
    rec = {name: np.array([getattr(r, name) for r in history]) for name in
           ("t", "u_h3", "y_norm", "omega_linf", "omega_l2", "grad_u_linf",
            "grad_phi_l2", "grad_phi_linf")}
    t = rec["t"]
    eps = cfg.epsilon
    out: dict[str, FittedConstant] = {}

    if t.size >= 3:
        dy = np.gradient(rec["y_norm"], t)
        rhs = (1.0 + rec["grad_u_linf"] + eps * rec["grad_phi_linf"]) * rec["y_norm"]
        out["energy"] = _fit("energy", t, np.maximum(dy, 0.0), rhs, 0.0)

    log_plus = np.maximum(np.log(rec["u_h3"]), 0.0)
    out["potential"] = _fit("potential", t, rec["grad_u_linf"],
                            1.0 + (1.0 + log_plus) * rec["omega_linf"] + rec["omega_l2"], 0.0)

    growth = rec["omega_l2"] - rec["omega_l2"][0]
    slack = rel_slack * rec["omega_l2"][0]
    forcing = eps * _cumtrapz(rec["grad_phi_l2"], t)
    out["vorticity_l2"] = _fit("vorticity_l2", t[1:], growth[1:], forcing[1:], slack)

    amplification = np.exp(_cumtrapz(rec["grad_u_linf"], t))
    for p, key in (("l2", "grad_phi_l2"), ("linf", "grad_phi_linf")):
        out[f"gradient_{p}"] = _fit(f"gradient_{p}", t, rec[key], rec[key][0] * amplification, 0.0)

    out["kozono_taniuchi"] = _fit("kozono_taniuchi", t, rec["grad_u_linf"],
                                  1.0 + np.log1p(rec["u_h3"]) * rec["omega_linf"], 0.0)
    return AprioriReport(out)
