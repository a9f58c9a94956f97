"""Synthetic writer for the dataset file format.

Unit tests build tiny datasets directly in the documented manifest +
blob layout; only the acceptance tests invoke the real generator CLI.
"""

from __future__ import annotations

import json
import zlib
from pathlib import Path

import numpy as np


def write_synthetic_dataset(stem, triples, fov: float = 100.0,
                            kind: str = "dataset", format_version: int = 1):
    """Write ``<stem>.json``/``<stem>.raw`` from (input, label, meta)
    triples of equal-shaped square float arrays."""
    stem = Path(stem)
    records = []
    offset = 0
    with open(stem.with_suffix(".raw"), "wb") as fh:
        for inp, lab, meta in triples:
            bin_in = np.asarray(inp).astype("<f4").tobytes()
            bin_lab = np.asarray(lab).astype("<f4").tobytes()
            records.append({
                "offset": offset,
                "n_pix": int(np.asarray(inp).shape[0]),
                "fov": fov,
                "meta": meta,
                "crc_input": zlib.crc32(bin_in),
                "crc_label": zlib.crc32(bin_lab),
            })
            fh.write(bin_in)
            fh.write(bin_lab)
            offset += len(bin_in) + len(bin_lab)
    stem.with_suffix(".json").write_text(json.dumps({
        "format_version": format_version,
        "kind": kind,
        "geometry": {},
        "records": records,
    }))
    return stem


def default_meta(pair_type: int = 1, n_det_kept: int = 30,
                 roi_radius: float = 45.0, pixel_size: float = 100.0 / 16,
                 **extra) -> dict:
    meta = {
        "pair_type": pair_type,
        "n_det_kept": n_det_kept,
        "roi_radius": roi_radius,
        "pixel_size": pixel_size,
        "augmentation": "original",
    }
    meta.update(extra)
    return meta
