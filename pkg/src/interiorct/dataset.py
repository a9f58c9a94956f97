"""Training-pair generation and the manifest + blob dataset format.

A dataset is a list of (input, label) image pairs:

* type 1: input = FBP of the truncated sinogram (cupping-corrupted),
  label = ground-truth image on the ROI disk;
* type 2: input = differentiated-backprojection image of the truncated
  sinogram, label = ground-truth image on the ROI disk.

On disk a dataset is one manifest JSON plus one raw little-endian
float32 blob; pairs are stored in manifest order, input then label,
row-major, with per-pair CRC32 checksums in the manifest.
"""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dbp import dbp_image
from .errors import ValidationError
from .fbp import fbp_reconstruct
from .geometry import Geometry, roi_radius
from .phantom import Phantom, analytic_sinogram, rasterize
from .projector import Image, disk_mask, truncate

__all__ = [
    "DatasetPair",
    "DatasetManifest",
    "build_pairs",
    "augment",
    "write_dataset",
    "read_dataset",
]

_FORMAT_VERSION = 1
ROTATION_SET = (45.0, 90.0, 135.0)


@dataclass
class DatasetPair:
    """One training example.  `phantom` is kept (not serialized) so that
    augmentation can re-simulate instead of interpolating images."""

    input: Image
    label: Image
    meta: dict = field(default_factory=dict)
    phantom: Phantom | None = None

    def __post_init__(self):
        if (self.input.n_pix != self.label.n_pix
                or abs(self.input.fov - self.label.fov) > 1e-9):
            raise ValidationError("input and label grids differ")


@dataclass
class DatasetManifest:
    format_version: int
    geometry: Geometry
    records: list

    @property
    def n_pairs(self) -> int:
        return len(self.records)


def _make_pair(phantom: Phantom, geom: Geometry, n_det_kept: int,
               pair_type: int, tag: str = "original") -> DatasetPair:
    sino = truncate(analytic_sinogram(phantom, geom), n_det_kept)
    if pair_type == 1:
        inp = fbp_reconstruct(sino, geom)
    else:
        inp = dbp_image(sino, geom).as_image()
    radius = roi_radius(geom, n_det_kept)
    mask = disk_mask(geom.n_pix, geom.fov, radius)
    truth = rasterize(phantom, geom.n_pix, geom.fov)
    label = Image(np.where(mask, truth, 0.0), geom.fov, mask)
    meta = {
        "pair_type": pair_type,
        "n_det_kept": n_det_kept,
        "roi_radius": radius,
        "pixel_size": geom.pixel_size,
        "pitch": geom.pitch,
        "start_angle": geom.start_angle,
        "augmentation": tag,
    }
    return DatasetPair(Image(inp.data, geom.fov, mask), label, meta, phantom)


def build_pairs(phantoms, geom: Geometry, detector_list, pair_type: int
                ) -> list[DatasetPair]:
    """One pair per (phantom, detector count).  `pair_type` is 1 (FBP
    input) or 2 (DBP input)."""
    if pair_type not in (1, 2):
        raise ValidationError(f"pair_type must be 1 or 2, got {pair_type}")
    detector_list = list(detector_list)
    if not detector_list:
        raise ValidationError("detector_list must be nonempty")
    if len(set(detector_list)) != len(detector_list):
        raise ValidationError(f"duplicate detector counts in {detector_list}")
    for n in detector_list:
        if not (1 <= n <= geom.n_det):
            raise ValidationError(
                f"detector count {n} outside [1, {geom.n_det}]")
    pairs = []
    for ph in phantoms:
        for n_kept in detector_list:
            pairs.append(_make_pair(ph, geom, n_kept, pair_type))
    return pairs


def augment(pairs, geom: Geometry, rotations=ROTATION_SET,
            flips: str = "none") -> list[DatasetPair]:
    """Rotation + flip augmentation.

    Each rotation angle [degrees] re-simulates the rotated phantom through
    the same pipeline, so the default three angles quadruple the count.
    `flips` is "none", "append" (adds horizontally and vertically flipped
    copies of the whole set) or "replace" (flipped copies only).
    """
    if flips not in ("none", "append", "replace"):
        raise ValidationError(f"flips must be none/append/replace, got {flips!r}")
    out = list(pairs)
    for pair in pairs:
        if pair.phantom is None:
            raise ValidationError(
                "augmentation needs pairs that carry their phantom")
        for deg in rotations:
            ph = pair.phantom.rotated(math.radians(deg))
            out.append(_make_pair(ph, geom, pair.meta["n_det_kept"],
                                  pair.meta["pair_type"], f"rot{deg:g}"))
    if flips == "none":
        return out
    flipped = []
    for pair in out:
        for tag, ax in (("hflip", 1), ("vflip", 0)):
            flipped.append(DatasetPair(
                Image(np.flip(pair.input.data, axis=ax).copy(),
                      pair.input.fov, pair.input.roi_mask),
                Image(np.flip(pair.label.data, axis=ax).copy(),
                      pair.label.fov, pair.label.roi_mask),
                {**pair.meta,
                 "augmentation": pair.meta["augmentation"] + "+" + tag},
                pair.phantom))
    return out + flipped if flips == "append" else flipped


def write_dataset(pairs, geom: Geometry, path) -> DatasetManifest:
    """Write `<path>.json` (manifest) and `<path>.raw` (blob)."""
    path = Path(path)
    jpath = path.with_suffix(".json")
    rpath = path.with_suffix(".raw")
    records = []
    offset = 0
    with open(rpath, "wb") as fh:
        for pair in pairs:
            bin_in = pair.input.data.astype("<f4").tobytes()
            bin_lab = pair.label.data.astype("<f4").tobytes()
            records.append({
                "offset": offset,
                "n_pix": pair.input.n_pix,
                "fov": pair.input.fov,
                "meta": pair.meta,
                "crc_input": zlib.crc32(bin_in),
                "crc_label": zlib.crc32(bin_lab),
            })
            fh.write(bin_in)
            fh.write(bin_lab)
            offset += len(bin_in) + len(bin_lab)
    manifest = DatasetManifest(_FORMAT_VERSION, geom, records)
    jpath.write_text(json.dumps({
        "format_version": _FORMAT_VERSION,
        "kind": "dataset",
        "geometry": json.loads(geom.to_json()),
        "records": records,
    }, indent=1))
    return manifest


def read_dataset(path) -> tuple[DatasetManifest, list[DatasetPair]]:
    path = Path(path)
    header = json.loads(path.with_suffix(".json").read_text())
    if header.get("kind") != "dataset":
        raise ValidationError(f"{path}: not a dataset manifest")
    if header.get("format_version") != _FORMAT_VERSION:
        raise ValidationError(
            f"{path}: unsupported format_version {header.get('format_version')}")
    geom = Geometry(**header["geometry"])
    blob = path.with_suffix(".raw").read_bytes()
    pairs = []
    for rec in header["records"]:
        n = rec["n_pix"]
        nbytes = 4 * n * n
        off = rec["offset"]
        if off + 2 * nbytes > len(blob):
            raise ValidationError(f"{path}: blob truncated at offset {off}")
        bin_in = blob[off:off + nbytes]
        bin_lab = blob[off + nbytes:off + 2 * nbytes]
        if (zlib.crc32(bin_in) != rec["crc_input"]
                or zlib.crc32(bin_lab) != rec["crc_label"]):
            raise ValidationError(f"{path}: checksum failure at offset {off}")
        inp = np.frombuffer(bin_in, dtype="<f4").astype(np.float64).reshape(n, n)
        lab = np.frombuffer(bin_lab, dtype="<f4").astype(np.float64).reshape(n, n)
        pairs.append(DatasetPair(Image(inp, rec["fov"]),
                                 Image(lab, rec["fov"]), dict(rec["meta"])))
    return DatasetManifest(_FORMAT_VERSION, geom, header["records"]), pairs
