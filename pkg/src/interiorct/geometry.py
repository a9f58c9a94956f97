"""Fan-beam acquisition geometry, ROI arithmetic, and chord parameterization.

Conventions used throughout the toolkit:

* x to the right, y up; angles counterclockwise from the +x axis, radians.
* The source at view angle beta sits at ``dso * (cos beta, sin beta)``.
* The detector is flat and equally spaced, centered on the ray through
  the isocenter, at distance ``dsd`` from the source.  The detector
  coordinate t runs along ``(-sin beta, cos beta)``.
* All lengths in mm.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict

import numpy as np

from .errors import ValidationError

__all__ = [
    "Geometry",
    "RoiSpec",
    "ChordSpec",
    "make_geometry",
    "roi_radius",
    "chord_tau",
    "chord_grid",
]


@dataclass(frozen=True)
class Geometry:
    """Fan-beam acquisition description.

    n_det:       number of detector cells
    pitch:       detector cell size [mm]
    n_views:     number of source positions
    dso:         source-to-isocenter distance [mm]
    dsd:         source-to-detector distance [mm]
    n_pix:       image side length [pixels]
    fov:         image side length [mm]
    scan_range:  angular range [rad]; 2*pi full scan, pi + fan for short scan
    start_angle: angle of the first view [rad]
    """

    n_det: int
    pitch: float
    n_views: int
    dso: float
    dsd: float
    n_pix: int
    fov: float
    scan_range: float = 2.0 * math.pi
    start_angle: float = 0.0

    def __post_init__(self):
        if self.n_det < 1:
            raise ValidationError(f"n_det must be >= 1, got {self.n_det}")
        if self.pitch <= 0:
            raise ValidationError(f"pitch must be > 0, got {self.pitch}")
        if self.n_views < 2:
            raise ValidationError(f"n_views must be >= 2, got {self.n_views}")
        if not (self.dsd > self.dso > 0):
            raise ValidationError(
                f"need dsd > dso > 0, got dsd={self.dsd}, dso={self.dso}")
        if self.n_pix < 1:
            raise ValidationError(f"n_pix must be >= 1, got {self.n_pix}")
        if self.fov <= 0:
            raise ValidationError(f"fov must be > 0, got {self.fov}")
        if not (0.0 < self.scan_range <= 2.0 * math.pi + 1e-12):
            raise ValidationError(
                f"scan_range must lie in (0, 2*pi], got {self.scan_range}")

    # -- derived quantities ------------------------------------------------

    @property
    def pixel_size(self) -> float:
        return self.fov / self.n_pix

    @property
    def fan_half_angle(self) -> float:
        """Half opening angle of the full detector [rad]."""
        return math.atan(self.n_det * self.pitch / 2.0 / self.dsd)

    def detector_coords(self) -> np.ndarray:
        """Physical detector cell centers t_j [mm], centered array."""
        j = np.arange(self.n_det)
        return (j - (self.n_det - 1) / 2.0) * self.pitch

    def view_angles(self) -> np.ndarray:
        """Source angles beta_i [rad], uniform over scan_range, endpoint excluded."""
        i = np.arange(self.n_views)
        return self.start_angle + i * (self.scan_range / self.n_views)

    def pixel_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """(x, y) pixel center coordinate vectors [mm]; data[iy, ix]."""
        d = self.pixel_size
        c = (np.arange(self.n_pix) + 0.5 - self.n_pix / 2.0) * d
        return c, c

    # -- serialization -----------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> "Geometry":
        return cls(**json.loads(text))


@dataclass(frozen=True)
class RoiSpec:
    """Central detector block retained after truncation and its ROI radius."""

    n_det_kept: int
    radius: float

    def __post_init__(self):
        if self.n_det_kept < 1:
            raise ValidationError(f"n_det_kept must be >= 1, got {self.n_det_kept}")
        if self.radius <= 0:
            raise ValidationError(f"radius must be > 0, got {self.radius}")


@dataclass(frozen=True)
class ChordSpec:
    """One chord of the ROI disk: direction of the chord family, signed
    perpendicular offset v, and half-length tau = sqrt(R^2 - v^2)."""

    direction: float
    v: float
    tau: float

    def __post_init__(self):
        if self.tau <= 0:
            raise ValidationError(f"tau must be > 0, got {self.tau}")


def make_geometry(n_det, pitch, n_views, dso, dsd, n_pix, fov=None,
                  scan_range=2.0 * math.pi, start_angle=0.0) -> Geometry:
    """Validated Geometry constructor.

    When fov is None the image square is sized to contain the full-detector
    ROI circle (side = 2 * roi_radius at n_det kept).
    """
    if fov is None:
        probe = Geometry(n_det, pitch, n_views, dso, dsd, n_pix, fov=1.0,
                         scan_range=scan_range, start_angle=start_angle)
        fov = 2.0 * roi_radius(probe, n_det)
    return Geometry(n_det, pitch, n_views, dso, dsd, n_pix, fov,
                    scan_range, start_angle)


def roi_radius(geom: Geometry, n_det_kept: int) -> float:
    """Radius R [mm] of the ROI disk covered by the central n_det_kept cells.

    R = dso * sin(atan(n_det_kept * pitch / 2 / dsd)) for a flat, centered,
    equally spaced detector.
    """
    if not (1 <= n_det_kept <= geom.n_det):
        raise ValidationError(
            f"n_det_kept must lie in [1, {geom.n_det}], got {n_det_kept}")
    half_width = n_det_kept * geom.pitch / 2.0
    return geom.dso * math.sin(math.atan(half_width / geom.dsd))


def chord_tau(radius: float, v: float) -> float:
    """Half-length of the chord at perpendicular offset v inside a disk of
    the given radius."""
    if abs(v) >= radius:
        raise ValidationError(
            f"chord offset |v|={abs(v)} lies outside the ROI radius {radius}")
    return math.sqrt(radius * radius - v * v)


def chord_grid(spec: ChordSpec, n_samples: int) -> np.ndarray:
    """Uniform sample abscissae on [-tau, tau], both endpoints included."""
    if n_samples < 2:
        raise ValidationError(f"n_samples must be >= 2, got {n_samples}")
    return np.linspace(-spec.tau, spec.tau, n_samples)
