from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import Literal

import numpy as np

from .grid import Grid2D
from .norms import hermitian_defect, sobolev_norm, spectral_extrema

System = Literal["boussinesq", "nh_euler"]
InitKind = Literal["taylor_green", "single_mode", "random_band"]


@dataclass(frozen=True)
class FlowField:
    """Spectral state: vorticity, transported scalar and the uniform mean velocity.

    ``omega_hat`` is the vorticity ω (Boussinesq) or ϖ (density-Euler);
    ``phi_hat`` the temperature or density perturbation φ. The mean velocity
    is not determined by the vorticity on the torus and is carried separately.
    """

    omega_hat: np.ndarray
    phi_hat: np.ndarray
    time: float = 0.0
    mean_velocity: tuple[float, float] = (0.0, 0.0)

    def check(self, tol: float = 1e-10) -> None:
        """Raise ``AssertionError`` if Hermitian symmetry or zero-mean vorticity fail."""
        for name in ("omega_hat", "phi_hat"):
            defect = hermitian_defect(getattr(self, name))
            assert defect < tol, f"{name} violates Hermitian symmetry ({defect:.2e})"
        scale = max(float(np.max(np.abs(self.omega_hat))), 1.0)
        assert abs(self.omega_hat[0, 0]) < tol * scale, "vorticity has nonzero mean"


@dataclass(frozen=True)
class SimConfig:
    grid: Grid2D
    dt: float
    t_end: float
    epsilon: float
    system: System = "boussinesq"
    pressure_tol: float = 1e-13
    pressure_max_iter: int = 50
    seed: int = 0
    cfl_max: float = 0.5

    def __post_init__(self):
        if self.system not in ("boussinesq", "nh_euler"):
            raise ValueError(f"unknown system {self.system!r}")
        if not (self.dt > 0 and self.t_end >= 0):
            raise ValueError("dt must be > 0 and t_end >= 0")
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be >= 0")
        if self.system == "nh_euler" and self.epsilon > 1:
            raise ValueError("nh_euler requires epsilon <= 1")
        if self.pressure_max_iter < 1 or not self.pressure_tol > 0:
            raise ValueError("invalid pressure solver settings")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def with_(self, **changes) -> SimConfig:
        return replace(self, **changes)

    def to_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "grid"}
        out["n"] = self.grid.n
        out["length"] = self.grid.length
        return out


@dataclass(frozen=True)
class InitSpec:
    kind: InitKind = "random_band"
    target_u_h3: float = 10.0
    target_phi_h3: float = 10.0
    nonneg_phi: bool = False
    seed: int | None = None


def velocity_from_vorticity(f: FlowField, g: Grid2D) -> tuple[np.ndarray, np.ndarray]:
    """Biot–Savart: ``ψ̂ = -ω̂/|k|²``, ``û = (-i k₂ ψ̂, i k₁ ψ̂)`` plus the mean flow."""
    k1, k2 = g.wavenumbers
    psi_hat = -f.omega_hat * g.inv_ksq
    u1 = -1j * k2 * psi_hat
    u2 = 1j * k1 * psi_hat
    n2 = g.n * g.n
    u1[0, 0] = f.mean_velocity[0] * n2
    u2[0, 0] = f.mean_velocity[1] * n2
    return u1, u2


def velocity_h3(omega_hat: np.ndarray, g: Grid2D) -> float:
    u1, u2 = velocity_from_vorticity(FlowField(omega_hat, omega_hat), g)
    return math.hypot(sobolev_norm(u1, 3, g), sobolev_norm(u2, 3, g))


def _random_band(g: Grid2D, rng: np.random.Generator) -> np.ndarray:
    m = np.hypot(g.index[:, None], g.index[None, :]).astype(float)
    envelope = np.exp(-(m / 4.0) ** 2)
    coef = (rng.standard_normal((g.n, g.n)) + 1j * rng.standard_normal((g.n, g.n)))
    coef *= envelope * g.band
    # real part symmetrizes the spectrum while keeping the radial band
    return g.fft(g.ifft(coef))


def init_fields(kind: InitKind, g: Grid2D, seed: int | None, target_u_h3: float,
                target_phi_h3: float, nonneg_phi: bool = False) -> FlowField:
    """Band-limited initial data with ``‖u0‖_{H³}`` and ``‖φ0‖_{H³}`` set to the targets.

    * ``taylor_green``: ω = 2 cos x cos y, φ = cos x;
    * ``single_mode``: ω = sin x, φ = cos y;
    * ``random_band``: Gaussian-envelope random modes with ``1 <= |k| <= n/8``.

    With ``nonneg_phi`` φ is shifted so that its (interpolated) minimum is
    zero before the final positive rescaling.
    """
    if not (target_u_h3 > 0 and target_phi_h3 > 0):
        raise ValueError("targets must be positive")
    x, y = g.mesh
    kx = 2 * math.pi / g.length
    if kind == "taylor_green":
        omega = 2 * np.cos(kx * x) * np.cos(kx * y)
        phi = np.cos(kx * x)
        omega_hat, phi_hat = g.fft(omega), g.fft(phi)
    elif kind == "single_mode":
        omega_hat, phi_hat = g.fft(np.sin(kx * x)), g.fft(np.cos(kx * y))
    elif kind == "random_band":
        rng = np.random.default_rng(seed)
        omega_hat = _random_band(g, rng)
        phi_hat = _random_band(g, rng)
    else:
        raise ValueError(f"unknown initial data kind {kind!r}")

    omega_hat[0, 0] = 0.0
    omega_hat = omega_hat * (target_u_h3 / velocity_h3(omega_hat, g))
    if nonneg_phi:
        _, phi_min = spectral_extrema(phi_hat, g)
        phi_hat = phi_hat.copy()
        phi_hat[0, 0] -= phi_min * g.n * g.n
    phi_hat = phi_hat * (target_phi_h3 / sobolev_norm(phi_hat, 3, g))
    return FlowField(omega_hat, phi_hat, 0.0)


def init_from_spec(spec: InitSpec, g: Grid2D, seed: int = 0) -> FlowField:
    return init_fields(spec.kind, g, spec.seed if spec.seed is not None else seed,
                       spec.target_u_h3, spec.target_phi_h3, spec.nonneg_phi)


def resample_spectrum(f_hat: np.ndarray, n_to: int) -> np.ndarray:
    """Zero-pad or truncate an fft2 spectrum to an ``n_to x n_to`` grid.

    Exact for band-limited data whose modes fit on both grids. The Nyquist
    row/column of the source is dropped.
    """
    n_from = f_hat.shape[0]
    m = min(n_from, n_to) // 2
    out = np.zeros((n_to, n_to), dtype=complex)
    idx_from = np.r_[0:m, n_from - m + 1:n_from]
    idx_to = np.r_[0:m, n_to - m + 1:n_to]
    out[np.ix_(idx_to, idx_to)] = f_hat[np.ix_(idx_from, idx_from)]
    return out * (n_to / n_from) ** 2


def resample_field(f: FlowField, g: Grid2D) -> FlowField:
    return FlowField(resample_spectrum(f.omega_hat, g.n), resample_spectrum(f.phi_hat, g.n),
                     f.time, f.mean_velocity)
