"""Fan-beam filtered backprojection (flat, equally spaced detector).

Pipeline: cosine pre-weight, optional Parker short-scan weights, Ram-Lak
ramp filtering in the virtual detector at the isocenter, then
distance-weighted backprojection.  Full-scan data carries the usual 1/2
redundancy factor; short scans (pi + fan) use Parker weights instead.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ValidationError
from .geometry import Geometry, roi_radius
from .projector import Image, Sinogram, disk_mask

__all__ = [
    "FilterSpec",
    "ramp_kernel",
    "ramp_filter",
    "parker_weights",
    "fbp_reconstruct",
    "cupping_image",
    "export_png",
]

from dataclasses import dataclass

_FULL_SCAN_TOL = 1e-6


@dataclass(frozen=True)
class FilterSpec:
    kind: str = "ramp"
    zero_pad_factor: int = 2

    def __post_init__(self):
        if self.kind not in ("ramp", "ramp-hann"):
            raise ValidationError(f"unknown filter kind {self.kind!r}")
        zp = self.zero_pad_factor
        if zp < 2 or (zp & (zp - 1)) != 0:
            raise ValidationError(
                f"zero_pad_factor must be a power of two >= 2, got {zp}")


def ramp_kernel(n: int, spacing: float) -> np.ndarray:
    """Band-limited Ram-Lak taps h[-n..n]: center 1/(4*d^2), odd taps
    -1/(pi*k*d)^2, even taps 0."""
    k = np.arange(-n, n + 1)
    h = np.zeros(2 * n + 1)
    h[n] = 1.0 / (4.0 * spacing * spacing)
    odd = (np.abs(k) % 2) == 1
    h[odd] = -1.0 / (np.pi * k[odd] * spacing) ** 2
    return h


def _ramp_response(n_det: int, spacing: float, spec: FilterSpec) -> np.ndarray:
    """Frequency response of the discrete Ram-Lak kernel on the padded grid;
    optional Hann apodization.  The kernel's DC gain is the (tiny) tail
    residual of the tap series and vanishes as the tap count grows; forcing
    it to exactly zero would bias flat regions, so it is left as is."""
    n_pad = 1
    while n_pad < spec.zero_pad_factor * n_det:
        n_pad *= 2
    h = np.zeros(n_pad)
    taps = ramp_kernel(n_det, spacing)
    h[:n_det + 1] = taps[n_det:]
    h[-n_det:] = taps[:n_det]
    resp = np.real(np.fft.fft(h))
    if spec.kind == "ramp-hann":
        nu = np.fft.fftfreq(n_pad)
        resp *= 0.5 * (1.0 + np.cos(2.0 * np.pi * nu))
    return resp


def ramp_filter(sino: Sinogram, spec: FilterSpec = FilterSpec()) -> Sinogram:
    """Convolve every detector row with the Ram-Lak taps (discrete
    convolution via zero-padded FFT; no grid-spacing factor applied).

    The taps are built for the virtual detector spacing at the isocenter,
    pitch * dso / dsd.
    """
    geom = sino.geom
    spacing = geom.pitch * geom.dso / geom.dsd
    resp = _ramp_response(geom.n_det, spacing, spec)
    n_pad = resp.size
    spec_rows = np.fft.fft(sino.data, n=n_pad, axis=1)
    filtered = np.real(np.fft.ifft(spec_rows * resp[None, :], axis=1))
    return Sinogram(filtered[:, :geom.n_det], geom, sino.mask.copy())


def parker_weights(geom: Geometry) -> np.ndarray:
    """Parker redundancy weights, shape (n_views, n_det).

    Valid for scan ranges in [pi + fan, 2*pi); the over-scan generalization
    uses half-fan gamma_m = (scan_range - pi) / 2.
    """
    gamma_m = (geom.scan_range - math.pi) / 2.0
    if gamma_m < geom.fan_half_angle - 1e-9:
        raise ValidationError(
            f"scan_range {geom.scan_range:.4f} is below pi + fan "
            f"({math.pi + 2 * geom.fan_half_angle:.4f}); short-scan FBP needs "
            "at least pi + fan coverage")
    # the classical weight formula assumes the conjugate ray sits at
    # beta + pi + 2*gamma; with the detector axis along (-sin, cos) the
    # conjugate is at beta + pi - 2*gamma, so gamma enters negated
    gamma = -np.arctan(geom.detector_coords() / geom.dsd)
    beta = geom.view_angles() - geom.start_angle
    b = beta[:, None]
    g = gamma[None, :]
    w = np.ones((geom.n_views, geom.n_det))

    def s2(x):
        return np.sin(np.pi / 4.0 * np.clip(x, 0.0, 2.0)) ** 2

    rising = b < 2.0 * (gamma_m - g)
    den1 = np.maximum(gamma_m - g, 1e-12)
    w = np.where(rising, s2(b / den1), w)
    falling = b > math.pi - 2.0 * g
    den2 = np.maximum(gamma_m + g, 1e-12)
    w = np.where(falling, s2((math.pi + 2.0 * gamma_m - b) / den2), w)
    return w


def fbp_reconstruct(sino: Sinogram, geom: Geometry | None = None,
                    spec: FilterSpec = FilterSpec()) -> Image:
    """Fan-beam FBP.  Full data reproduces the object; truncated data
    returns the cupping-corrupted object-plus-null image."""
    if geom is None:
        geom = sino.geom
    elif geom.n_views != sino.geom.n_views or geom.n_det != sino.geom.n_det:
        raise ValidationError("geometry does not match the sinogram")

    s_iso = geom.detector_coords() * geom.dso / geom.dsd
    ds = geom.pitch * geom.dso / geom.dsd
    cosw = geom.dso / np.sqrt(geom.dso ** 2 + s_iso ** 2)
    weighted = sino.data * cosw[None, :]

    full_scan = geom.scan_range > 2.0 * math.pi - _FULL_SCAN_TOL
    if not full_scan:
        weighted = weighted * parker_weights(geom)

    filtered = ramp_filter(Sinogram(weighted, geom, sino.mask), spec).data * ds

    xs, ys = geom.pixel_centers()
    x = xs[None, :]
    y = ys[:, None]
    betas = geom.view_angles()
    dbeta = geom.scan_range / geom.n_views
    out = np.zeros((geom.n_pix, geom.n_pix))
    for i, beta in enumerate(betas):
        cb, sb = math.cos(beta), math.sin(beta)
        r = x * cb + y * sb
        u = -x * sb + y * cb
        U = (geom.dso - r) / geom.dso
        s_prime = u / U
        q = np.interp(s_prime.ravel(), s_iso, filtered[i], left=0.0, right=0.0)
        out += q.reshape(geom.n_pix, geom.n_pix) / (U * U)
    out *= dbeta
    if full_scan:
        out *= 0.5
    return Image(out, geom.fov)


def cupping_image(sino_trunc: Sinogram, geom: Geometry,
                  ground_truth: Image) -> Image:
    """Empirical null-space image: FBP of the truncated data minus the
    ground truth, restricted to the ROI disk of the kept detector block."""
    if (ground_truth.n_pix != geom.n_pix
            or abs(ground_truth.fov - geom.fov) > 1e-9):
        raise ValidationError("ground truth grid does not match geometry")
    recon = fbp_reconstruct(sino_trunc, geom)
    radius = roi_radius(geom, sino_trunc.n_det_kept)
    mask = disk_mask(geom.n_pix, geom.fov, radius)
    diff = np.where(mask, recon.data - ground_truth.data, 0.0)
    return Image(diff, geom.fov, mask)


def export_png(img: Image, path, window: tuple[float, float] = (-150.0, 300.0)):
    """8-bit PNG with the given display window (lo, hi), y-axis flipped to
    image orientation."""
    from PIL import Image as PILImage

    lo, hi = window
    if hi <= lo:
        raise ValidationError(f"window must satisfy hi > lo, got {window}")
    arr = np.clip((img.data - lo) / (hi - lo), 0.0, 1.0)
    arr8 = (arr[::-1, :] * 255.0).round().astype(np.uint8)
    PILImage.fromarray(arr8, mode="L").save(path)
