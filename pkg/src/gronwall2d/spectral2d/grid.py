from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

FFT_WORKERS = -1


@dataclass(frozen=True)
class Grid2D:
    """Uniform ``n x n`` collocation grid on the periodic square of side ``length``.

    Array axis 0 is x₁ and axis 1 is x₂. Spectral arrays use the unnormalized
    ``fft2`` convention: the Fourier coefficient of mode k is ``f_hat[k] / n²``.
    """

    n: int
    length: float = 2 * math.pi

    def __post_init__(self):
        if self.n < 16 or self.n & (self.n - 1):
            raise ValueError(f"n must be a power of two >= 16, got {self.n}")
        if not self.length > 0:
            raise ValueError("length must be positive")

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def cell_area(self) -> float:
        return self.dx * self.dx

    @cached_property
    def x(self) -> np.ndarray:
        return np.arange(self.n) * self.dx

    @cached_property
    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return tuple(np.meshgrid(self.x, self.x, indexing="ij"))

    @cached_property
    def index(self) -> np.ndarray:
        """Integer mode numbers along one axis, in fft order."""
        return np.fft.fftfreq(self.n, 1.0 / self.n).astype(int)

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, np.ndarray]:
        k = 2 * math.pi / self.length * self.index.astype(float)
        return k[:, None] * np.ones((1, self.n)), np.ones((self.n, 1)) * k[None, :]

    @cached_property
    def ksq(self) -> np.ndarray:
        k1, k2 = self.wavenumbers
        return k1 * k1 + k2 * k2

    @cached_property
    def inv_ksq(self) -> np.ndarray:
        out = np.zeros_like(self.ksq)
        np.divide(1.0, self.ksq, out=out, where=self.ksq > 0)
        return out

    @cached_property
    def dealias(self) -> np.ndarray:
        """2/3-rule mask: keeps modes with ``|m1|, |m2| <= n/3``."""
        m = np.abs(self.index)
        keep = m <= self.n / 3
        return keep[:, None] & keep[None, :]

    @cached_property
    def band(self) -> np.ndarray:
        """Radial band ``1 <= |m| <= n/8`` used for generated initial data."""
        m1 = self.index[:, None].astype(float)
        m2 = self.index[None, :].astype(float)
        r = np.hypot(m1, m2)
        return (r >= 1) & (r <= self.n / 8)

    def fft(self, f: np.ndarray) -> np.ndarray:
        return sfft.fft2(f, workers=FFT_WORKERS)

    def ifft(self, f_hat: np.ndarray) -> np.ndarray:
        return sfft.ifft2(f_hat, workers=FFT_WORKERS).real

    def deriv(self, f_hat: np.ndarray, axis: int) -> np.ndarray:
        """Spectral derivative ∂_{axis+1} f, returned in physical space."""
        return self.ifft(1j * self.wavenumbers[axis] * f_hat)

    def mean(self, f: np.ndarray) -> float:
        return float(np.mean(f))
