"""Finite-Hilbert inversion on chords: analytic weighting, the inversion
formula, null-space signals, and the offset function.

All formulas are evaluated after affine rescaling of [-tau, tau] to
[-1, 1] (one quadrature implementation, one boundary policy) and mapped
back.  Under x = tau * u the finite Hilbert transform is scale invariant,
while the chord mass rescales as c -> c / tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .hilbert import ChordSignal, cauchy_pv

__all__ = [
    "InversionInputs",
    "weight_w",
    "finite_hilbert_inverse",
    "null_space_signal",
    "dbp_null_component",
    "offset_epsilon",
    "chord_inversion",
]

BOUNDARY_BAND = 0.02


@dataclass
class InversionInputs:
    """Either (g_tilde, c) for the direct formula or (g, epsilon) for the
    offset form; exactly one pair may be populated."""

    g_tilde: ChordSignal | None = None
    c: float | None = None
    g: ChordSignal | None = None
    epsilon: ChordSignal | None = None

    def __post_init__(self):
        direct = self.g_tilde is not None and self.c is not None
        offset = self.g is not None and self.epsilon is not None
        if direct == offset:
            raise ValidationError(
                "exactly one of (g_tilde, c) or (g, epsilon) must be populated")

    def invert(self) -> ChordSignal:
        if self.g_tilde is not None:
            return finite_hilbert_inverse(self.g_tilde, self.c)
        return chord_inversion(self.g, self.epsilon)


def weight_w(tau: float, u):
    """Analytic chord weighting w_tau(u) = pi * sqrt(tau^2 - u^2)."""
    u = np.asarray(u, dtype=np.float64)
    if np.any(np.abs(u) > tau):
        raise ValidationError(f"|u| must be <= tau={tau}")
    out = np.pi * np.sqrt(np.maximum(tau * tau - u * u, 0.0))
    return float(out) if out.ndim == 0 else out


def finite_hilbert_inverse(g_tilde: ChordSignal, c: float) -> ChordSignal:
    """Invert the finite Hilbert transform given the chord mass c:

        f(u) = c / (pi*sqrt(1-u^2))
               - (1/(pi*sqrt(1-u^2))) * p.v. int sqrt(1-s^2) g~(s) / (u-s) ds

    on the rescaled interval; the result is returned on the open interior
    grid (endpoints +/-tau dropped) of the input.
    """
    if g_tilde.n < 4:
        raise ValidationError("inversion needs at least 4 samples")
    tau = g_tilde.tau
    grid1 = g_tilde.grid / tau
    c1 = c / tau
    phi = np.sqrt(np.maximum(1.0 - grid1 * grid1, 0.0)) * g_tilde.samples
    if g_tilde.open_grid:
        eval1 = grid1
        keep = slice(None)
    else:
        eval1 = grid1[1:-1]
        keep = slice(1, -1)
    pv = cauchy_pv(phi, grid1, 1.0, g_tilde.open_grid, eval_points=eval1)
    denom = np.pi * np.sqrt(np.maximum(1.0 - eval1 * eval1, 1e-300))
    f1 = (c1 - pv) / denom
    out = ChordSignal(f1, tau, g_tilde.v, open_grid=True)
    # keep the original abscissae: rebuild as an explicit interior grid
    if not g_tilde.open_grid:
        out = _on_grid(f1, g_tilde.grid[keep], tau, g_tilde.v)
    return out


@dataclass
class _InteriorChord(ChordSignal):
    """ChordSignal on an explicit (uniform, endpoint-free) abscissa set."""

    def __init__(self, samples, abscissae, tau, v):
        self._abscissae = np.asarray(abscissae, dtype=np.float64)
        super().__init__(samples, tau, v, open_grid=True)

    @property
    def grid(self):
        return self._abscissae


def _on_grid(samples, abscissae, tau, v):
    return _InteriorChord(samples, abscissae, tau, v)


def _exterior_quadrature(func, tau, support, n_quad):
    """Quadrature nodes/weights over intervals of `support`, all outside
    [-tau, tau]."""
    if isinstance(support[0], (int, float)):
        support = [tuple(support)]
    nodes = []
    weights = []
    for a, b in support:
        if b <= a:
            raise ValidationError(f"bad support interval ({a}, {b})")
        if a < tau and b > -tau:
            raise ValidationError(
                f"support interval ({a}, {b}) overlaps [-tau, tau]")
        # midpoint rule: nodes never touch +/-tau, where the kernel blows up
        h = (b - a) / n_quad
        x = a + (np.arange(n_quad) + 0.5) * h
        nodes.append(x)
        weights.append(np.full(n_quad, h))
    x = np.concatenate(nodes)
    return x, np.concatenate(weights), func(x)


def null_space_signal(psi, tau: float, grid: np.ndarray, support,
                      n_quad: int = 4096) -> ChordSignal:
    """Null-space signal of the finite Hilbert transform:

        f_N(u) = -(1/pi) * int over R \\ [-tau, tau] of psi(u') / (u - u') du'

    `psi` is a callable supported on `support` (one interval or a list of
    intervals, all outside [-tau, tau]).  No singularity arises since the
    evaluation points satisfy |u| < tau < |u'|.
    """
    grid = np.asarray(grid, dtype=np.float64)
    if np.any(np.abs(grid) > tau):
        raise ValidationError("evaluation grid must lie inside [-tau, tau]")
    x, w, vals = _exterior_quadrature(psi, tau, support, n_quad)
    kern = 1.0 / (grid[:, None] - x[None, :])
    out = -(kern * (w * vals)[None, :]).sum(axis=1) / math.pi
    return _on_grid(out, grid, tau, 0.0)


def dbp_null_component(f, tau: float, grid: np.ndarray, support,
                       n_quad: int = 4096) -> ChordSignal:
    """Exterior contribution to the DBP data:

        g_N(u) = -(1/pi) * int over R \\ [-tau, tau] of f(u') / (u - u') du'

    `f` is the full-support function; only its exterior part contributes.
    """
    if isinstance(support[0], (int, float)):
        support = [tuple(support)]
    exterior = []
    for a, b in support:
        if a < -tau:
            exterior.append((a, min(b, -tau)))
        if b > tau:
            exterior.append((max(a, tau), b))
    if not exterior:
        return _on_grid(np.zeros(np.asarray(grid).size), np.asarray(grid), tau, 0.0)
    return null_space_signal(f, tau, grid, exterior, n_quad)


def offset_epsilon(g_n: ChordSignal, c: float) -> ChordSignal:
    """Offset function (validation path; unknown in the true interior problem):

        epsilon(u) = c - p.v. int sqrt(1-s^2) g_N(s) / (u-s) ds

    evaluated on the [-1, 1]-rescaled grid; the returned samples are in the
    rescaled frame, paired with the chord's physical tau.
    """
    tau = g_n.tau
    grid1 = g_n.grid / tau
    c1 = c / tau
    phi = np.sqrt(np.maximum(1.0 - grid1 * grid1, 0.0)) * g_n.samples
    h = grid1[1] - grid1[0]
    pv = _pv_on_abscissae(phi, grid1, h)
    return _on_grid(c1 - pv, g_n.grid, tau, g_n.v)


def _pv_on_abscissae(phi, grid1, h):
    """cauchy_pv generalized to an arbitrary uniform abscissa set inside
    [-1, 1] (open interior grids from _InteriorChord included)."""
    w = np.full(grid1.size, h)
    lo = grid1[0] - h / 2.0
    hi = grid1[-1] + h / 2.0
    dphi = np.gradient(phi, h)
    diff = grid1[:, None] - grid1[None, :]
    near = np.abs(diff) < 1e-12
    safe = np.where(near, 1.0, diff)
    integrand = (phi[None, :] - phi[:, None]) / safe
    integrand = np.where(near, -dphi[:, None], integrand)
    out = integrand @ w
    out += phi * np.log(np.clip(grid1 - lo, h / 2.0, None)
                        / np.clip(hi - grid1, h / 2.0, None))
    return out


def chord_inversion(g: ChordSignal, epsilon: ChordSignal,
                    boundary_band: float = BOUNDARY_BAND) -> ChordSignal:
    """Weighted-chord inversion from measurable data plus the offset:

        (w (.) f)(u) = epsilon(u) - T[ w (.) g ](u),   w(u) = pi*sqrt(1-u^2)

    in the rescaled frame, then division by w on the open interior.  Values
    within `boundary_band` of +/-tau are not returned (w vanishes there).
    """
    if g.n != epsilon.n:
        raise ValidationError("g and epsilon must share a grid")
    tau = g.tau
    grid1 = g.grid / tau
    w = np.pi * np.sqrt(np.maximum(1.0 - grid1 * grid1, 0.0))
    phi = w * g.samples
    h = grid1[1] - grid1[0]
    t_wg = _pv_on_abscissae(phi, grid1, h) / math.pi
    weighted_f = epsilon.samples - t_wg
    keep = np.abs(grid1) <= 1.0 - boundary_band
    f1 = weighted_f[keep] / w[keep]
    return _on_grid(f1, g.grid[keep], tau, g.v)
