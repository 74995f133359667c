from __future__ import annotations

import numpy as np

from .grid import Grid2D


def sobolev_norm(f_hat: np.ndarray, s: float, g: Grid2D) -> float:
    """``H^s`` norm through the Fourier multiplier ``(1 + |k|²)^{s/2}``.

    ``f_hat`` uses the unnormalized fft2 convention; the result matches the
    continuum L² integral when ``s = 0`` (Parseval).
    """
    coef = np.abs(f_hat) / g.n**2
    weight = (1.0 + g.ksq) ** s
    return float(np.sqrt(np.sum(weight * coef * coef)) * g.length)


def l2_norm(f: np.ndarray, g: Grid2D) -> float:
    """L² norm of a physical-space field by the grid quadrature."""
    return float(np.sqrt(np.sum(f * f) * g.cell_area))


def hermitian_defect(f_hat: np.ndarray) -> float:
    """Largest ``|f_hat(-k) - conj f_hat(k)|``, relative to ``max |f_hat|``."""
    flipped = np.roll(np.flip(f_hat, axis=(0, 1)), 1, axis=(0, 1))
    scale = max(float(np.max(np.abs(f_hat))), 1e-300)
    return float(np.max(np.abs(flipped - np.conj(f_hat)))) / scale


def _trig_eval(c: np.ndarray, k: np.ndarray, x: float, y: float):
    """Value, gradient and Hessian of ``Re Σ c_k e^{i(k1 x + k2 y)}``."""
    ex = np.exp(1j * k * x)
    ey = np.exp(1j * k * y)
    cy = c @ ey
    cy_y = c @ (1j * k * ey)
    cy_yy = c @ (-(k * k) * ey)
    ikx = 1j * k * ex
    val = (ex @ cy).real
    gx = (ikx @ cy).real
    gy = (ex @ cy_y).real
    hxx = ((-(k * k) * ex) @ cy).real
    hxy = (ikx @ cy_y).real
    hyy = (ex @ cy_yy).real
    return val, np.array([gx, gy]), np.array([[hxx, hxy], [hxy, hyy]])


def _refine(c, k, x0, y0, sign, step_cap, iters=30):
    pick = max if sign > 0 else min
    x = np.array([x0, y0], dtype=float)
    best = None
    for _ in range(iters):
        val, grad, hess = _trig_eval(c, k, *x)
        best = val if best is None else pick(best, val)
        try:
            step = -np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            break
        # only accept steps towards an extremum of the requested kind
        if sign * float(grad @ step) < 0:
            break
        size = float(np.hypot(*step))
        if size < 1e-14:
            break
        if size > step_cap:
            step *= step_cap / size
        x = x + step
    return best


def spectral_extrema(f_hat: np.ndarray, g: Grid2D, candidates: int = 3) -> tuple[float, float]:
    """Max and min of the trigonometric interpolant of ``f_hat``.

    Starts Newton iterations from the largest (smallest) grid values and
    never returns anything below (above) the grid extremum.
    """
    f = g.ifft(f_hat)
    c = f_hat / g.n**2
    k = 2 * np.pi / g.length * g.index.astype(float)
    # drop the unpaired Nyquist mode, which is not real off the grid
    nyq = g.n // 2
    c = c.copy()
    c[nyq, :] = 0.0
    c[:, nyq] = 0.0
    flat = f.ravel()
    out = []
    for sign in (1.0, -1.0):
        order = np.argsort(-sign * flat)[:candidates]
        best = float(flat[order[0]])
        for idx in order:
            i, j = divmod(int(idx), g.n)
            val = _refine(c, k, g.x[i], g.x[j], sign, g.dx)
            best = max(best, val) if sign > 0 else min(best, val)
        out.append(best)
    return out[0], out[1]
