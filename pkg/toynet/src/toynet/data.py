"""Reader for the dataset manifest + blob file format.

A dataset on disk is ``<stem>.json`` (manifest) plus ``<stem>.raw``
(little-endian float32 blob).  The manifest lists one record per pair
with the blob byte offset, grid size, field of view, per-pair metadata
and CRC32 checksums of the input and label payloads.  Pairs are stored
input then label, row-major.

This module is deliberately self-contained: it depends only on the
documented file format, not on the toolkit that produced the files.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["Pair", "load_pairs", "roi_mask", "DatasetFormatError",
           "MASK_ERODE_PX"]

_FORMAT_VERSION = 1

# The outermost ring of a truncated reconstruction carries edge spikes
# from the cut detector channels, so the working ROI is shrunk by this
# many pixel widths relative to the pair's recorded ROI radius.
MASK_ERODE_PX = 2.0


class DatasetFormatError(ValueError):
    """Raised when a dataset file is missing, corrupt, or incompatible."""


@dataclass
class Pair:
    """One training example: input image, label image, ROI mask, metadata.

    ``input`` and ``label`` are float32 ``(n, n)`` arrays on the same
    centered grid (side length ``fov`` mm); ``mask`` is the boolean ROI
    disk derived from the pair's recorded ROI radius, eroded by
    ``MASK_ERODE_PX`` pixel widths.
    """

    input: np.ndarray
    label: np.ndarray
    mask: np.ndarray
    fov: float
    meta: dict

    @property
    def pair_type(self) -> int:
        return int(self.meta["pair_type"])

    @property
    def n_det_kept(self) -> int:
        return int(self.meta["n_det_kept"])


def roi_mask(n_pix: int, fov: float, radius: float) -> np.ndarray:
    """Boolean disk of the given radius [mm] on the centered pixel grid."""
    delta = fov / n_pix
    c = (np.arange(n_pix) + 0.5 - n_pix / 2.0) * delta
    return (c[None, :] ** 2 + c[:, None] ** 2) <= radius * radius


def load_pairs(stem) -> list[Pair]:
    """Read every pair of ``<stem>.json`` / ``<stem>.raw``, verifying the
    manifest kind, format version, and per-pair checksums."""
    stem = Path(stem)
    jpath = stem.with_suffix(".json")
    rpath = stem.with_suffix(".raw")
    if not jpath.exists() or not rpath.exists():
        raise DatasetFormatError(f"dataset files not found for stem {stem}")
    header = json.loads(jpath.read_text())
    if header.get("kind") != "dataset":
        raise DatasetFormatError(f"{jpath}: not a dataset manifest")
    if header.get("format_version") != _FORMAT_VERSION:
        raise DatasetFormatError(
            f"{jpath}: unsupported format_version "
            f"{header.get('format_version')}")
    blob = rpath.read_bytes()
    pairs = []
    for rec in header["records"]:
        n = int(rec["n_pix"])
        nbytes = 4 * n * n
        off = int(rec["offset"])
        if off + 2 * nbytes > len(blob):
            raise DatasetFormatError(f"{rpath}: blob truncated at {off}")
        bin_in = blob[off:off + nbytes]
        bin_lab = blob[off + nbytes:off + 2 * nbytes]
        if (zlib.crc32(bin_in) != rec["crc_input"]
                or zlib.crc32(bin_lab) != rec["crc_label"]):
            raise DatasetFormatError(f"{rpath}: checksum failure at {off}")
        fov = float(rec["fov"])
        meta = dict(rec["meta"])
        erode = MASK_ERODE_PX * float(meta.get("pixel_size", fov / n))
        mask = roi_mask(n, fov, float(meta["roi_radius"]) - erode)
        pairs.append(Pair(
            np.frombuffer(bin_in, dtype="<f4").reshape(n, n).copy(),
            np.frombuffer(bin_lab, dtype="<f4").reshape(n, n).copy(),
            mask, fov, meta))
    return pairs
