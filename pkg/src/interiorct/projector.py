"""Numerical fan-beam forward projection and truncation operators.

The Sinogram/Image containers and their two-file (.json + .raw) formats
live here; the raw payload is little-endian float32, row-major
(view-major for sinograms).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from numba import njit, prange

from .errors import ValidationError
from .geometry import Geometry

__all__ = [
    "Sinogram",
    "Image",
    "forward_project",
    "back_project",
    "truncate",
    "subsample_views",
    "write_sinogram",
    "read_sinogram",
    "write_image",
    "read_image",
]

_FORMAT_VERSION = 1


@dataclass
class Sinogram:
    """n_views x n_det line integrals plus the truncation mask (True = measured)."""

    data: np.ndarray
    geom: Geometry
    mask: np.ndarray = field(default=None)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.shape != (self.geom.n_views, self.geom.n_det):
            raise ValidationError(
                f"sinogram shape {self.data.shape} does not match geometry "
                f"({self.geom.n_views}, {self.geom.n_det})")
        if self.mask is None:
            self.mask = np.ones(self.geom.n_det, dtype=bool)
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.mask.shape != (self.geom.n_det,):
            raise ValidationError("mask must have one entry per detector cell")

    @property
    def n_det_kept(self) -> int:
        return int(self.mask.sum())

    @property
    def is_truncated(self) -> bool:
        return not self.mask.all()


@dataclass
class Image:
    """Square pixel grid with physical FOV; data[iy, ix], y up."""

    data: np.ndarray
    fov: float
    roi_mask: np.ndarray | None = None

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 2 or self.data.shape[0] != self.data.shape[1]:
            raise ValidationError(f"image must be square 2-D, got {self.data.shape}")
        if self.fov <= 0:
            raise ValidationError(f"fov must be > 0, got {self.fov}")

    @property
    def n_pix(self) -> int:
        return self.data.shape[0]

    @property
    def pixel_size(self) -> float:
        return self.fov / self.n_pix


def disk_mask(n_pix: int, fov: float, radius: float) -> np.ndarray:
    """Boolean disk of the given radius [mm] centered at the isocenter."""
    d = fov / n_pix
    c = (np.arange(n_pix) + 0.5 - n_pix / 2.0) * d
    x, y = np.meshgrid(c, c)
    return x * x + y * y <= radius * radius


def forward_project(img: Image, geom: Geometry, step_factor: float = 0.5) -> Sinogram:
    """Ray-driven fan-beam projection with bilinear interpolation.

    Integration step is `step_factor` pixels (default half a pixel).
    """
    if abs(img.fov - geom.fov) > 1e-9 or img.n_pix != geom.n_pix:
        raise ValidationError(
            f"image grid ({img.n_pix}, fov={img.fov}) does not match geometry "
            f"({geom.n_pix}, fov={geom.fov})")

    d = geom.pixel_size
    step = step_factor * d
    # integrate over the chord of the circle that circumscribes the image
    r_img = geom.fov * math.sqrt(2.0) / 2.0
    t0, t1 = geom.dso - r_img, geom.dso + r_img
    n_steps = int(math.ceil((t1 - t0) / step)) + 1
    ts = np.linspace(t0, t1, n_steps)
    dt = ts[1] - ts[0]

    data = _project_kernel(np.ascontiguousarray(img.data),
                           geom.detector_coords(), geom.view_angles(), ts, dt,
                           geom.dso, geom.dsd, d)
    return Sinogram(data, geom, np.ones(geom.n_det, dtype=bool))


@njit(cache=True, parallel=True)
def _project_kernel(grid, t_det, betas, ts, dt, dso, dsd, d):
    n_views = betas.size
    n_det = t_det.size
    n = grid.shape[0]
    half = n / 2.0 - 0.5
    data = np.empty((n_views, n_det))
    for i in prange(n_views):
        cb = math.cos(betas[i])
        sb = math.sin(betas[i])
        sx = dso * cb
        sy = dso * sb
        for j in range(n_det):
            dx = -dsd * cb - t_det[j] * sb
            dy = -dsd * sb + t_det[j] * cb
            norm = math.sqrt(dx * dx + dy * dy)
            dx /= norm
            dy /= norm
            acc = 0.0
            for k in range(ts.size):
                fx = (sx + dx * ts[k]) / d + half
                fy = (sy + dy * ts[k]) / d + half
                x0 = int(math.floor(fx))
                y0 = int(math.floor(fy))
                if x0 < -1 or x0 > n - 1 or y0 < -1 or y0 > n - 1:
                    continue
                wx = fx - x0
                wy = fy - y0
                v00 = grid[y0, x0] if (x0 >= 0 and y0 >= 0) else 0.0
                v10 = grid[y0, x0 + 1] if (x0 + 1 < n and y0 >= 0) else 0.0
                v01 = grid[y0 + 1, x0] if (x0 >= 0 and y0 + 1 < n) else 0.0
                v11 = grid[y0 + 1, x0 + 1] if (x0 + 1 < n and y0 + 1 < n) else 0.0
                acc += ((1 - wx) * (1 - wy) * v00 + wx * (1 - wy) * v10
                        + (1 - wx) * wy * v01 + wx * wy * v11)
            data[i, j] = acc * dt
    return data


def _bilinear(grid: np.ndarray, fx: np.ndarray, fy: np.ndarray) -> np.ndarray:
    """Bilinear sample grid[iy, ix] at fractional indices; zero outside."""
    n_y, n_x = grid.shape
    x0 = np.floor(fx).astype(np.int64)
    y0 = np.floor(fy).astype(np.int64)
    wx = fx - x0
    wy = fy - y0
    out = np.zeros_like(fx)
    for ddx, ddy, w in ((0, 0, (1 - wx) * (1 - wy)), (1, 0, wx * (1 - wy)),
                        (0, 1, (1 - wx) * wy), (1, 1, wx * wy)):
        xi = x0 + ddx
        yi = y0 + ddy
        valid = (xi >= 0) & (xi < n_x) & (yi >= 0) & (yi < n_y)
        out += np.where(valid, grid[np.clip(yi, 0, n_y - 1),
                                    np.clip(xi, 0, n_x - 1)] * w, 0.0)
    return out


def back_project(sino: Sinogram, geom: Geometry, step_factor: float = 0.5) -> Image:
    """Adjoint of :func:`forward_project` (same ray sampling, transposed
    bilinear scatter).  Not a reconstruction operator by itself; used by
    iterative solvers."""
    d = geom.pixel_size
    step = step_factor * d
    r_img = geom.fov * math.sqrt(2.0) / 2.0
    t0, t1 = geom.dso - r_img, geom.dso + r_img
    n_steps = int(math.ceil((t1 - t0) / step)) + 1
    ts = np.linspace(t0, t1, n_steps)
    dt = ts[1] - ts[0]
    out = _backproject_kernel(np.ascontiguousarray(sino.data),
                              geom.detector_coords(), geom.view_angles(), ts,
                              dt, geom.dso, geom.dsd, d, geom.n_pix)
    return Image(out, geom.fov)


@njit(cache=True)
def _backproject_kernel(data, t_det, betas, ts, dt, dso, dsd, d, n):
    half = n / 2.0 - 0.5
    out = np.zeros((n, n))
    for i in range(betas.size):
        cb = math.cos(betas[i])
        sb = math.sin(betas[i])
        sx = dso * cb
        sy = dso * sb
        for j in range(t_det.size):
            val = data[i, j] * dt
            if val == 0.0:
                continue
            dx = -dsd * cb - t_det[j] * sb
            dy = -dsd * sb + t_det[j] * cb
            norm = math.sqrt(dx * dx + dy * dy)
            dx /= norm
            dy /= norm
            for k in range(ts.size):
                fx = (sx + dx * ts[k]) / d + half
                fy = (sy + dy * ts[k]) / d + half
                x0 = int(math.floor(fx))
                y0 = int(math.floor(fy))
                if x0 < -1 or x0 > n - 1 or y0 < -1 or y0 > n - 1:
                    continue
                wx = fx - x0
                wy = fy - y0
                if x0 >= 0 and y0 >= 0:
                    out[y0, x0] += (1 - wx) * (1 - wy) * val
                if x0 + 1 < n and y0 >= 0:
                    out[y0, x0 + 1] += wx * (1 - wy) * val
                if x0 >= 0 and y0 + 1 < n:
                    out[y0 + 1, x0] += (1 - wx) * wy * val
                if x0 + 1 < n and y0 + 1 < n:
                    out[y0 + 1, x0 + 1] += wx * wy * val
    return out


def kept_slice(n_det: int, n_det_kept: int) -> slice:
    """Central block of kept channels.  For a parity mismatch the extra
    channel goes to the positive-t side (deterministic)."""
    lo = (n_det - n_det_kept) // 2
    return slice(lo, lo + n_det_kept)


def truncate(sino: Sinogram, n_det_kept: int) -> Sinogram:
    """Zero all channels outside the central n_det_kept block; update mask."""
    geom = sino.geom
    if not (1 <= n_det_kept <= geom.n_det):
        raise ValidationError(
            f"n_det_kept must lie in [1, {geom.n_det}], got {n_det_kept}")
    sl = kept_slice(geom.n_det, n_det_kept)
    data = np.zeros_like(sino.data)
    data[:, sl] = sino.data[:, sl]
    mask = np.zeros(geom.n_det, dtype=bool)
    mask[sl] = sino.mask[sl]
    return Sinogram(data, geom, mask)


def subsample_views(sino: Sinogram, n_views_kept: int) -> Sinogram:
    """Uniformly decimate the view set; geometry is updated to match."""
    geom = sino.geom
    if n_views_kept < 2:
        raise ValidationError(f"n_views_kept must be >= 2, got {n_views_kept}")
    if geom.n_views % n_views_kept != 0:
        raise ValidationError(
            f"n_views_kept={n_views_kept} must divide n_views={geom.n_views}")
    stride = geom.n_views // n_views_kept
    new_geom = replace(geom, n_views=n_views_kept)
    return Sinogram(sino.data[::stride].copy(), new_geom, sino.mask.copy())


# -- file formats ----------------------------------------------------------

def _write_raw(path: Path, arr: np.ndarray):
    arr.astype("<f4").tofile(path)


def write_sinogram(sino: Sinogram, stem) -> tuple[Path, Path]:
    """Write `<stem>.json` (geometry + mask) and `<stem>.raw` (float32 LE,
    view-major)."""
    stem = Path(stem)
    header = {
        "format_version": _FORMAT_VERSION,
        "kind": "sinogram",
        "geometry": json.loads(sino.geom.to_json()),
        "mask": sino.mask.astype(int).tolist(),
    }
    jpath = stem.with_suffix(".json")
    rpath = stem.with_suffix(".raw")
    jpath.write_text(json.dumps(header, indent=1))
    _write_raw(rpath, sino.data)
    return jpath, rpath


def read_sinogram(stem) -> Sinogram:
    stem = Path(stem)
    header = json.loads(stem.with_suffix(".json").read_text())
    if header.get("kind") != "sinogram":
        raise ValidationError(f"{stem}: not a sinogram header")
    if header.get("format_version") != _FORMAT_VERSION:
        raise ValidationError(
            f"{stem}: unsupported format_version {header.get('format_version')}")
    geom = Geometry(**header["geometry"])
    data = np.fromfile(stem.with_suffix(".raw"), dtype="<f4")
    if data.size != geom.n_views * geom.n_det:
        raise ValidationError(f"{stem}: raw payload size mismatch")
    mask = np.asarray(header["mask"], dtype=bool)
    return Sinogram(data.reshape(geom.n_views, geom.n_det).astype(np.float64),
                    geom, mask)


def write_image(img: Image, stem, extra_header: dict | None = None) -> tuple[Path, Path]:
    """Write `<stem>.json` + `<stem>.raw` (float32 LE, row-major)."""
    stem = Path(stem)
    header = {
        "format_version": _FORMAT_VERSION,
        "kind": "image",
        "n_pix": img.n_pix,
        "fov": img.fov,
    }
    if img.roi_mask is not None:
        header["roi_mask"] = True
    if extra_header:
        header.update(extra_header)
    jpath = stem.with_suffix(".json")
    rpath = stem.with_suffix(".raw")
    jpath.write_text(json.dumps(header, indent=1))
    if img.roi_mask is not None:
        payload = np.concatenate([img.data.ravel(),
                                  img.roi_mask.astype(np.float64).ravel()])
    else:
        payload = img.data.ravel()
    _write_raw(rpath, payload)
    return jpath, rpath


def read_image(stem) -> Image:
    stem = Path(stem)
    header = json.loads(stem.with_suffix(".json").read_text())
    if header.get("kind") != "image":
        raise ValidationError(f"{stem}: not an image header")
    if header.get("format_version") != _FORMAT_VERSION:
        raise ValidationError(
            f"{stem}: unsupported format_version {header.get('format_version')}")
    n = header["n_pix"]
    data = np.fromfile(stem.with_suffix(".raw"), dtype="<f4").astype(np.float64)
    if header.get("roi_mask"):
        if data.size != 2 * n * n:
            raise ValidationError(f"{stem}: raw payload size mismatch")
        img = data[:n * n].reshape(n, n)
        mask = data[n * n:].reshape(n, n) > 0.5
        return Image(img, header["fov"], mask)
    if data.size != n * n:
        raise ValidationError(f"{stem}: raw payload size mismatch")
    return Image(data.reshape(n, n), header["fov"])
