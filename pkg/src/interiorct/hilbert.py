"""Full-line and finite Hilbert transforms on sampled 1-D signals.

Sign convention: H f(u) = p.v. integral of f(eta) / (pi * (u - eta)),
so H[cos] = sin and the spectrum multiplier is -i * sgn(nu).

Principal values are evaluated by singularity subtraction on uniform
grids; the Cauchy log term is carried analytically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = ["ChordSignal", "hilbert_1d", "cauchy_pv", "finite_hilbert"]


@dataclass
class ChordSignal:
    """Uniformly sampled function on a chord [-tau, tau].

    closed grids include both endpoints; open grids are cell-centered
    (useful when the sampled function is singular at +/-tau).
    """

    samples: np.ndarray
    tau: float
    v: float = 0.0
    open_grid: bool = False

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1 or self.samples.size < 2:
            raise ValidationError("chord signal needs >= 2 samples on a 1-D grid")
        if self.tau <= 0:
            raise ValidationError(f"tau must be > 0, got {self.tau}")

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def grid(self) -> np.ndarray:
        if self.open_grid:
            h = 2.0 * self.tau / self.n
            return -self.tau + (np.arange(self.n) + 0.5) * h
        return np.linspace(-self.tau, self.tau, self.n)

    @property
    def spacing(self) -> float:
        return 2.0 * self.tau / self.n if self.open_grid \
            else 2.0 * self.tau / (self.n - 1)

    def to_csv(self, path):
        """CSV profile (u, value) for external plotting."""
        np.savetxt(path, np.column_stack([self.grid, self.samples]),
                   delimiter=",", header="u,value", comments="")


def hilbert_1d(signal: np.ndarray, axis: int = -1, pad_factor: int = 4) -> np.ndarray:
    """Discrete full-line Hilbert transform via the FFT.

    The signal is zero-padded by at least `pad_factor` and the spectrum
    multiplied by -i * sgn(nu).  Accuracy degrades in a band near the ends
    of the sampled window; compare on the interior only.
    """
    signal = np.asarray(signal, dtype=np.float64)
    n = signal.shape[axis]
    if n < 2:
        raise ValidationError("hilbert_1d needs >= 2 samples")
    n_pad = 1
    while n_pad < pad_factor * n:
        n_pad *= 2
    spec = np.fft.fft(signal, n=n_pad, axis=axis)
    nu = np.fft.fftfreq(n_pad)
    mult = -1j * np.sign(nu)
    shape = [1] * signal.ndim
    shape[axis] = n_pad
    out = np.real(np.fft.ifft(spec * mult.reshape(shape), axis=axis))
    return np.take(out, np.arange(n), axis=axis)


def _quad_weights(n: int, h: float, open_grid: bool) -> np.ndarray:
    if open_grid:
        return np.full(n, h)
    w = np.full(n, h)
    w[0] = w[-1] = h / 2.0
    return w


def cauchy_pv(phi: np.ndarray, grid: np.ndarray, tau: float,
              open_grid: bool = False, eval_points: np.ndarray | None = None
              ) -> np.ndarray:
    """p.v. integral over [-tau, tau] of phi(s) / (u - s) ds.

    Singularity subtraction:
        integral (phi(s) - phi(u)) / (u - s) ds  +  phi(u) * ln((tau+u)/(tau-u))
    with the subtracted integrand continued by -phi'(u) at s = u.
    Evaluated at the grid points, or at `eval_points` when given.  At the
    closed-grid endpoints the log term is regularized with a half cell.
    """
    phi = np.asarray(phi, dtype=np.float64)
    grid = np.asarray(grid, dtype=np.float64)
    n = grid.size
    h = grid[1] - grid[0]
    w = _quad_weights(n, h, open_grid)
    dphi = np.gradient(phi, h)

    if eval_points is None:
        u = grid
        phi_u = phi
        dphi_u = dphi
    else:
        u = np.asarray(eval_points, dtype=np.float64)
        phi_u = np.interp(u, grid, phi)
        dphi_u = np.interp(u, grid, dphi)

    diff = u[:, None] - grid[None, :]
    near = np.abs(diff) < 1e-9 * max(h, 1e-300)
    safe = np.where(near, 1.0, diff)
    integrand = (phi[None, :] - phi_u[:, None]) / safe
    integrand = np.where(near, -dphi_u[:, None], integrand)
    result = integrand @ w

    up = np.clip(tau + u, h / 2.0, None)
    um = np.clip(tau - u, h / 2.0, None)
    result += phi_u * np.log(up / um)
    return result


def finite_hilbert(f: ChordSignal) -> ChordSignal:
    """Finite Hilbert transform on [-tau, tau]:
    T f(u) = p.v. integral of f(s) / (pi * (u - s)) ds, evaluated on f's grid."""
    vals = cauchy_pv(f.samples, f.grid, f.tau, f.open_grid) / np.pi
    return ChordSignal(vals, f.tau, f.v, f.open_grid)
