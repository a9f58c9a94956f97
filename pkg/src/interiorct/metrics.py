"""Image-quality metrics: PSNR (two normalizations), global SSIM, NMSE.

PSNR comes in two modes.  ``paper`` uses the factor n*m in the numerator,
``standard`` the usual sqrt(n*m); both are kept so that published numbers
in either convention can be reproduced.  The two differ by exactly
20*log10(sqrt(n*m)) dB for any image pair.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict

import numpy as np

from .errors import ValidationError
from .projector import Image

__all__ = ["MetricReport", "psnr", "ssim_global", "nmse", "evaluate"]

PSNR_INF = math.inf


def _as_arrays(est, ref, roi_mask=None):
    a = est.data if isinstance(est, Image) else np.asarray(est, dtype=np.float64)
    b = ref.data if isinstance(ref, Image) else np.asarray(ref, dtype=np.float64)
    if a.shape != b.shape:
        raise ValidationError(
            f"grid mismatch: estimate {a.shape} vs reference {b.shape}")
    if roi_mask is not None:
        if roi_mask.shape != a.shape:
            raise ValidationError("ROI mask shape does not match the images")
        a = a[roi_mask]
        b = b[roi_mask]
    return a.ravel(), b.ravel()


def psnr(est, ref, mode: str = "standard", roi_mask=None) -> float:
    """Peak signal-to-noise ratio in dB.

    mode="paper":    20*log10(n*m * max|ref| / ||est - ref||_2)
    mode="standard": 20*log10(sqrt(n*m) * max|ref| / ||est - ref||_2)

    Identical images return +inf.
    """
    if mode not in ("paper", "standard"):
        raise ValidationError(f"unknown psnr mode {mode!r}")
    a, b = _as_arrays(est, ref, roi_mask)
    if not np.any(b):
        raise ValidationError("reference image is all-zero")
    err = float(np.linalg.norm(a - b))
    if err == 0.0:
        return PSNR_INF
    peak = float(np.abs(b).max())
    nm = a.size
    factor = nm if mode == "paper" else math.sqrt(nm)
    return 20.0 * math.log10(factor * peak / err)


def ssim_global(est, ref, k1: float = 0.01, k2: float = 0.03,
                roi_mask=None) -> float:
    """Single-window SSIM over the whole image (no local windowing).

    The stabilizers are c1 = (k1*L)^2, c2 = (k2*L)^2 with L the dynamic
    range of the reference.
    """
    a, b = _as_arrays(est, ref, roi_mask)
    L = float(np.ptp(b))
    if L == 0.0:
        L = max(float(np.abs(b).max()), 1e-12)
    c1 = (k1 * L) ** 2
    c2 = (k2 * L) ** 2
    mu_a = a.mean()
    mu_b = b.mean()
    var_a = a.var()
    var_b = b.var()
    cov = float(((a - mu_a) * (b - mu_b)).mean())
    return float(((2 * mu_a * mu_b + c1) * (2 * cov + c2))
                 / ((mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2)))


def nmse(est, ref, roi_mask=None) -> float:
    """Normalized mean square error ||est - ref||^2 / ||ref||^2."""
    a, b = _as_arrays(est, ref, roi_mask)
    denom = float(np.dot(b, b))
    if denom == 0.0:
        raise ValidationError("reference image is all-zero")
    d = a - b
    return float(np.dot(d, d)) / denom


@dataclass
class MetricReport:
    psnr_paper: float
    psnr_standard: float
    ssim: float
    nmse: float
    roi_masked: bool = False

    def to_json(self) -> str:
        d = asdict(self)
        for k in ("psnr_paper", "psnr_standard"):
            if math.isinf(d[k]):
                d[k] = "inf"
        return json.dumps(d, indent=1)

    def to_csv_row(self) -> str:
        return ",".join(str(v) for v in
                        (self.psnr_paper, self.psnr_standard, self.ssim,
                         self.nmse, int(self.roi_masked)))

    @staticmethod
    def csv_header() -> str:
        return "psnr_paper,psnr_standard,ssim,nmse,roi_masked"


def evaluate(est, ref, roi_mask=None) -> MetricReport:
    """All metrics at once, optionally restricted to a boolean ROI mask."""
    return MetricReport(
        psnr_paper=psnr(est, ref, "paper", roi_mask),
        psnr_standard=psnr(est, ref, "standard", roi_mask),
        ssim=ssim_global(est, ref, roi_mask=roi_mask),
        nmse=nmse(est, ref, roi_mask),
        roi_masked=roi_mask is not None,
    )
