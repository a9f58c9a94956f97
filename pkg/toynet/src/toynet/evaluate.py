"""Cross-truncation evaluation of trained checkpoints.

``evaluate_generalization`` runs each checkpoint over test datasets at
several kept-detector counts and reports the per-count mean PSNR plus
each model's drop from its best count, which is the statistic that
separates a model that merely memorized its trained truncation levels
from one whose input representation is truncation-independent.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from .data import load_pairs
from .model import ToyNet, ToyNetConfig

__all__ = ["GeneralizationReport", "load_checkpoint", "predict",
           "psnr_standard", "evaluate_generalization"]


def psnr_standard(est: np.ndarray, ref: np.ndarray,
                  mask: np.ndarray) -> float:
    """20*log10(sqrt(N)*max|ref|/||est-ref||) over the masked pixels."""
    a = est[mask].astype(np.float64)
    b = ref[mask].astype(np.float64)
    err = float(np.linalg.norm(a - b))
    if err == 0.0:
        return math.inf
    return 20.0 * math.log10(math.sqrt(a.size) * float(np.abs(b).max()) / err)


def load_checkpoint(path) -> tuple[ToyNet, dict]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"checkpoint not found: {path}")
    ckpt = torch.load(path, map_location="cpu", weights_only=False)
    model = ToyNet(ToyNetConfig(**ckpt["config"]))
    model.load_state_dict(ckpt["state_dict"])
    model.eval()
    return model, ckpt


def predict(model: ToyNet, ckpt: dict, pair) -> np.ndarray:
    """Network estimate for one pair, in label units, zero outside the ROI."""
    clip = model.config.clip_sigma
    x = np.clip(pair.input * ckpt["input_scale"], -clip, clip)
    with torch.no_grad():
        out = model(torch.from_numpy(
            x[None, None].astype(np.float32)))[0, 0].numpy()
    return out.astype(np.float64) / ckpt["label_scale"] * pair.mask


@dataclass
class GeneralizationReport:
    """PSNR table and drop-from-best statistics over detector counts."""

    psnr: dict            # model name -> {count: mean PSNR [dB]}
    trained_counts: dict  # model name -> [counts present in its train set]
    best: dict            # model name -> (best count, best PSNR)
    drop: dict            # model name -> {count: best PSNR - PSNR at count}
    unseen_counts: dict = field(default_factory=dict)

    def to_json(self) -> str:
        def keyed(d):
            return {m: {str(k): v for k, v in t.items()}
                    for m, t in d.items()}
        return json.dumps({
            "psnr": keyed(self.psnr),
            "trained_counts": self.trained_counts,
            "best": {m: {"count": c, "psnr": p}
                     for m, (c, p) in self.best.items()},
            "drop": keyed(self.drop),
            "unseen_counts": self.unseen_counts,
        }, indent=1)


def evaluate_generalization(checkpoints: dict, datasets: dict
                            ) -> GeneralizationReport:
    """Evaluate every checkpoint on every dataset.

    ``checkpoints`` maps model name -> checkpoint path; ``datasets`` maps
    kept-detector count -> dataset stem (held-out phantoms, single count)
    or, when models of both pair types are evaluated together, count ->
    {pair_type: stem}.  At least one evaluated count must be absent from
    every model's training set.
    """
    if not checkpoints:
        raise ValueError("no checkpoints given")
    if not datasets:
        raise ValueError("no datasets given")
    counts = sorted(datasets)
    loaded = {}
    for count, entry in datasets.items():
        stems = entry if isinstance(entry, dict) else {None: entry}
        loaded[count] = {}
        for key, stem in stems.items():
            pairs = load_pairs(stem)
            if not pairs:
                raise ValueError(f"dataset for count {count} is empty")
            wrong = [p for p in pairs if p.n_det_kept != count]
            if wrong:
                raise ValueError(
                    f"dataset for count {count} contains pairs at "
                    f"{sorted({p.n_det_kept for p in wrong})} kept detectors")
            loaded[count][key] = pairs

    table, trained, best, drop, unseen = {}, {}, {}, {}, {}
    for name, ckpt_path in checkpoints.items():
        model, ckpt = load_checkpoint(ckpt_path)
        row = {}
        for count in counts:
            by_type = loaded[count]
            if None in by_type:
                pairs = by_type[None]
            elif ckpt["pair_type"] in by_type:
                pairs = by_type[ckpt["pair_type"]]
            else:
                raise ValueError(
                    f"no dataset of type {ckpt['pair_type']} for count "
                    f"{count} (model {name})")
            bad = {p.pair_type for p in pairs} - {ckpt["pair_type"]}
            if bad:
                raise ValueError(
                    f"model {name} is type {ckpt['pair_type']} but the "
                    f"count-{count} dataset contains type(s) {sorted(bad)}")
            vals = [psnr_standard(predict(model, ckpt, p), p.label, p.mask)
                    for p in pairs]
            row[count] = float(np.mean(vals))
        table[name] = row
        trained[name] = list(ckpt["trained_counts"])
        unseen[name] = [c for c in counts if c not in trained[name]]
        if not unseen[name]:
            raise ValueError(
                f"model {name}: no unseen detector count in the grid "
                f"{counts} (trained on {trained[name]})")
        best_count = max(row, key=row.get)
        best[name] = (best_count, row[best_count])
        drop[name] = {c: row[best_count] - v for c, v in row.items()}
    return GeneralizationReport(table, trained, best, drop, unseen)
