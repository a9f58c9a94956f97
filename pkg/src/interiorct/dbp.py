"""Differentiated backprojection, fan-to-parallel rebinning, and BPF.

The DBP route rebins fan data to parallel geometry and applies the 2-D
identity

    g(x) = - integral over theta in [0, pi) of
             sgn(n(theta) . e) * dP/ds (theta, x . n(theta)) dtheta

with n(theta) = (cos theta, sin theta), which yields g = 2*pi * H_e f for
noiseless full data (H_e: Hilbert transform along the unit direction e).
BPF then inverts the finite Hilbert transform chord by chord.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IllPosedError, ValidationError
from .geometry import Geometry, roi_radius
from .hilbert import ChordSignal
from .projector import Image, Sinogram, disk_mask

__all__ = [
    "DbpImage",
    "ParallelSinogram",
    "rebin_to_parallel",
    "view_derivative",
    "dbp_image",
    "chord_integrals_from_sinogram",
    "bpf_reconstruct",
]


@dataclass
class DbpImage:
    """DBP data g on the image grid (units: density scaled by 2*pi)."""

    data: np.ndarray
    fov: float
    direction: float
    roi_mask: np.ndarray | None = None

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        self.direction = float(self.direction) % math.pi

    @property
    def n_pix(self) -> int:
        return self.data.shape[0]

    def as_image(self) -> Image:
        return Image(self.data, self.fov, self.roi_mask)


@dataclass
class ParallelSinogram:
    """Rebinned parallel data P(theta, s): line {x . n(theta) = s}."""

    data: np.ndarray
    thetas: np.ndarray
    s: np.ndarray


def rebin_to_parallel(sino: Sinogram, n_theta: int | None = None,
                      n_s: int | None = None,
                      s_max: float | None = None) -> ParallelSinogram:
    """Fan-to-parallel rebinning by bilinear interpolation in (beta, t).

    The fan ray at source angle beta and detector coordinate t has fan
    angle gamma = atan(t / dsd), parallel offset s = dso * sin(gamma) and
    normal angle theta = beta + pi/2 - gamma.  Both the ray and its
    conjugate are used; valid contributions are averaged.
    """
    geom = sino.geom
    if n_theta is None:
        n_theta = max(256, geom.n_views // 2)
    if n_s is None:
        n_s = 2 * geom.n_det + 1
    if s_max is None:
        s_max = 0.999 * geom.dso * math.sin(geom.fan_half_angle)

    thetas = np.arange(n_theta) * math.pi / n_theta
    s = np.linspace(-s_max, s_max, n_s)
    gamma = np.arcsin(np.clip(s / geom.dso, -1.0, 1.0))

    t_max = (geom.n_det - 1) / 2.0 * geom.pitch
    dbeta = geom.scan_range / geom.n_views
    full_scan = geom.scan_range > 2.0 * math.pi - 1e-6

    out = np.zeros((n_theta, n_s))
    wsum = np.zeros((n_theta, n_s))
    th = thetas[:, None]
    g = gamma[None, :]
    for sign in (+1.0, -1.0):
        beta = th + sign * (g - math.pi / 2.0)
        t = sign * geom.dsd * np.tan(g)
        fb = (beta - geom.start_angle) / dbeta
        if full_scan:
            fb = np.mod(fb, geom.n_views)
            valid_b = np.ones_like(fb, dtype=bool)
        else:
            valid_b = (fb >= 0.0) & (fb <= geom.n_views - 1)
        ft = t / geom.pitch + (geom.n_det - 1) / 2.0
        valid = valid_b & (np.abs(t) <= t_max)
        vals = _bilinear_periodic(sino.data, fb, ft, full_scan)
        out += np.where(valid, vals, 0.0)
        wsum += valid
    with np.errstate(invalid="ignore"):
        out = np.where(wsum > 0, out / np.maximum(wsum, 1), 0.0)
    return ParallelSinogram(out, thetas, s)


def _bilinear_periodic(grid: np.ndarray, fi: np.ndarray, fj: np.ndarray,
                       periodic_rows: bool) -> np.ndarray:
    n_i, n_j = grid.shape
    i0 = np.floor(fi).astype(np.int64)
    j0 = np.floor(fj).astype(np.int64)
    wi = fi - i0
    wj = fj - j0
    out = np.zeros_like(fi, dtype=np.float64)
    for di, dj, w in ((0, 0, (1 - wi) * (1 - wj)), (1, 0, wi * (1 - wj)),
                      (0, 1, (1 - wi) * wj), (1, 1, wi * wj)):
        ii = i0 + di
        jj = j0 + dj
        if periodic_rows:
            ii = np.mod(ii, n_i)
            ok = (jj >= 0) & (jj < n_j)
        else:
            ok = (ii >= 0) & (ii < n_i) & (jj >= 0) & (jj < n_j)
        out += np.where(ok, grid[np.clip(ii, 0, n_i - 1),
                                 np.clip(jj, 0, n_j - 1)] * w, 0.0)
    return out


def view_derivative(sino: Sinogram, n_theta: int | None = None,
                    n_s: int | None = None) -> ParallelSinogram:
    """Derivative of the projection data along the detector coordinate,
    taken after fan-to-parallel rebinning (the trajectory derivative at
    fixed ray direction reduces to d/ds in parallel geometry)."""
    if sino.geom.n_views < 3:
        raise ValidationError("need at least 3 views for a derivative")
    par = rebin_to_parallel(sino, n_theta, n_s)
    ds = par.s[1] - par.s[0]
    return ParallelSinogram(np.gradient(par.data, ds, axis=1), par.thetas, par.s)


def dbp_image(sino: Sinogram, geom: Geometry | None = None,
              direction: float = 0.0, n_theta: int | None = None,
              n_s: int | None = None) -> DbpImage:
    """Differentiated backprojection image along the Hilbert direction e.

    For full data g = 2*pi * H_e f; truncated data agrees with the full
    DBP inside the ROI disk of the kept detector block.
    """
    if geom is None:
        geom = sino.geom
    direction = float(direction) % math.pi
    if n_theta is None:
        n_theta = max(512, sino.geom.n_views)
    if n_s is None:
        n_s = 3 * sino.geom.n_det + 1
    deriv = view_derivative(sino, n_theta, n_s)

    xs = (np.arange(geom.n_pix) + 0.5 - geom.n_pix / 2.0) * geom.pixel_size
    x = xs[None, :]
    y = xs[:, None]
    dtheta = math.pi / deriv.thetas.size
    out = np.zeros((geom.n_pix, geom.n_pix))
    for i, th in enumerate(deriv.thetas):
        sign = np.sign(math.cos(th - direction))
        if sign == 0.0:
            continue
        s_eval = x * math.cos(th) + y * math.sin(th)
        vals = np.interp(s_eval.ravel(), deriv.s, deriv.data[i],
                         left=0.0, right=0.0)
        out -= sign * vals.reshape(geom.n_pix, geom.n_pix)
    out *= dtheta

    radius = roi_radius(geom, sino.n_det_kept)
    mask = disk_mask(geom.n_pix, geom.fov, radius)
    return DbpImage(out, geom.fov, direction, mask)


def chord_integrals_from_sinogram(sino: Sinogram, direction: float,
                                  v_grid: np.ndarray) -> np.ndarray:
    """Chord masses c(v) = integral of f along the chord at offset v,
    obtained from the rebinned parallel projection perpendicular to the
    chord direction."""
    theta = (direction + math.pi / 2.0) % (2.0 * math.pi)
    flip = False
    if theta >= math.pi:
        theta -= math.pi
        flip = True
    geom = sino.geom
    s_max = 0.999 * geom.dso * math.sin(geom.fan_half_angle)
    n_s = 2 * geom.n_det + 1
    # rebin a single parallel view at the needed angle
    par = _rebin_single_angle(sino, theta, n_s, s_max)
    v = -np.asarray(v_grid) if flip else np.asarray(v_grid)
    return np.interp(v, par[0], par[1], left=0.0, right=0.0)


def _rebin_single_angle(sino: Sinogram, theta: float, n_s: int, s_max: float):
    geom = sino.geom
    s = np.linspace(-s_max, s_max, n_s)
    gamma = np.arcsin(np.clip(s / geom.dso, -1.0, 1.0))
    t_max = (geom.n_det - 1) / 2.0 * geom.pitch
    dbeta = geom.scan_range / geom.n_views
    full_scan = geom.scan_range > 2.0 * math.pi - 1e-6
    out = np.zeros(n_s)
    wsum = np.zeros(n_s)
    for sign in (+1.0, -1.0):
        beta = theta + sign * (gamma - math.pi / 2.0)
        t = sign * geom.dsd * np.tan(gamma)
        fb = (beta - geom.start_angle) / dbeta
        if full_scan:
            fb = np.mod(fb, geom.n_views)
            valid_b = np.ones_like(fb, dtype=bool)
        else:
            valid_b = (fb >= 0.0) & (fb <= geom.n_views - 1)
        ft = t / geom.pitch + (geom.n_det - 1) / 2.0
        valid = valid_b & (np.abs(t) <= t_max)
        vals = _bilinear_periodic(sino.data, fb, ft, full_scan)
        out += np.where(valid, vals, 0.0)
        wsum += valid
    out = np.where(wsum > 0, out / np.maximum(wsum, 1), 0.0)
    return s, out


def bpf_reconstruct(sino: Sinogram, geom: Geometry | None = None,
                    direction: float = 0.0,
                    chord_integrals: np.ndarray | None = None,
                    boundary_band: float = 0.02) -> Image:
    """Backprojection-filtration reconstruction from full (non-truncated)
    data: finite-Hilbert inversion of g/(2*pi) on chords parallel to e.

    `chord_integrals`, when given, supplies the chord masses c on the
    pixel-row offset grid; otherwise they are rebinned from the sinogram.
    """
    from .inversion import finite_hilbert_inverse

    if geom is None:
        geom = sino.geom
    if sino.is_truncated:
        raise IllPosedError(
            "BPF on truncated data: the interior problem is ill-posed without "
            "a prior; use interiorct.tv (TV-POCS) or provide full data")
    direction = float(direction) % math.pi

    g = dbp_image(sino, geom, direction)
    radius = 0.995 * min(roi_radius(geom, geom.n_det), geom.fov / 2.0)

    coords = (np.arange(geom.n_pix) + 0.5 - geom.n_pix / 2.0) * geom.pixel_size
    if chord_integrals is None:
        chord_integrals = chord_integrals_from_sinogram(sino, direction, coords)

    e = np.array([math.cos(direction), math.sin(direction)])
    e_perp = np.array([-e[1], e[0]])
    d = geom.pixel_size
    n = geom.n_pix

    # reconstruct in the chord-aligned frame (u along e, v along e_perp)
    chord_frame = np.zeros((n, n))
    for vi, v in enumerate(coords):
        if abs(v) >= radius:
            continue
        tau = math.sqrt(radius * radius - v * v)
        m = max(2 * int(math.ceil(tau / d)) + 1, 9)
        u = np.linspace(-tau, tau, m)
        px = u * e[0] + v * e_perp[0]
        py = u * e[1] + v * e_perp[1]
        g_chord = _bilinear_image(g.data, px / d + n / 2.0 - 0.5,
                                  py / d + n / 2.0 - 0.5)
        g_tilde = ChordSignal(g_chord / (2.0 * math.pi), tau, v)
        c = float(chord_integrals[vi])
        f_chord = finite_hilbert_inverse(g_tilde, c)
        keep = np.abs(f_chord.grid) <= (1.0 - boundary_band) * tau
        chord_frame[vi] = np.interp(coords, f_chord.grid[keep],
                                    f_chord.samples[keep], left=0.0, right=0.0)
        chord_frame[vi, np.abs(coords) > (1.0 - boundary_band) * tau] = 0.0

    # map back to the image frame
    x = coords[None, :]
    y = coords[:, None]
    u_eval = x * e[0] + y * e[1]
    v_eval = x * e_perp[0] + y * e_perp[1]
    out = _bilinear_image(chord_frame, u_eval / d + n / 2.0 - 0.5,
                          v_eval / d + n / 2.0 - 0.5)
    mask = disk_mask(n, geom.fov, radius)
    return Image(np.where(mask, out, 0.0), geom.fov, mask)


def _bilinear_image(grid: np.ndarray, fx: np.ndarray, fy: np.ndarray) -> np.ndarray:
    """Bilinear sample grid[iy, ix] at fractional indices (zero outside)."""
    from .projector import _bilinear
    return _bilinear(grid, fx, fy)
