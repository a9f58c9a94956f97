"""Training loop: MSE regression from pair inputs to pair labels.

Inputs are fed unmasked (standardized by a training-set scale computed
inside the ROI disks, then clipped to tame truncation-edge spikes); the
loss is computed only inside each pair's ROI mask.  Keeping the mask out
of the input is deliberate: the in-ROI content of a truncation-robust
input representation is identical at every truncation level, and an
input-side mask would turn the mask radius itself into a feature.  The
normalization scales are stored in the checkpoint so inference can undo
them.  Training is deterministic under a fixed seed (single process, no
data-loading workers).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .data import Pair, load_pairs
from .model import ToyNet, ToyNetConfig

__all__ = ["TrainResult", "train"]


@dataclass
class TrainResult:
    checkpoint_path: Path
    loss_curve_path: Path
    losses: list
    input_scale: float
    label_scale: float
    trained_counts: list


def _scales(pairs) -> tuple[float, float]:
    ins = np.concatenate([p.input[p.mask] for p in pairs])
    labs = np.concatenate([p.label[p.mask] for p in pairs])
    return (1.0 / max(float(ins.std()), 1e-12),
            1.0 / max(float(labs.std()), 1e-12))


def _crop_size(n_pix: int, config: ToyNetConfig) -> int:
    div = 2 ** config.stages
    side = min(config.patch, n_pix)
    side -= side % div
    if side < div:
        raise ValueError(
            f"patch/grid size {side} too small for {config.stages} stages")
    return side


def train(dataset_stem, config: ToyNetConfig, pair_type: int,
          outdir, run_name: str = "model") -> TrainResult:
    """Train one network on a dataset of the given pair type.

    Writes ``<run_name>.pt`` (checkpoint) and ``<run_name>_loss.csv``
    (per-epoch mean loss) into ``outdir``.  Raises ``ValueError`` if the
    dataset's pair type does not match ``pair_type`` and ``RuntimeError``
    if the loss becomes non-finite.
    """
    pairs = load_pairs(dataset_stem)
    if not pairs:
        raise ValueError(f"dataset {dataset_stem} is empty")
    bad = {p.pair_type for p in pairs} - {pair_type}
    if bad:
        raise ValueError(
            f"dataset/type mismatch: requested type {pair_type}, "
            f"dataset contains type(s) {sorted(bad | {pair_type})}")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    torch.manual_seed(config.seed)
    scale_in, scale_lab = _scales(pairs)
    n_pix = pairs[0].input.shape[0]
    side = _crop_size(n_pix, config)

    stack_in = np.clip(np.stack([p.input for p in pairs]) * scale_in,
                       -config.clip_sigma, config.clip_sigma)
    stack_lab = np.stack([p.label * p.mask for p in pairs]) * scale_lab
    stack_m = np.stack([p.mask for p in pairs])
    x_all = torch.from_numpy(stack_in[:, None].astype(np.float32))
    y_all = torch.from_numpy(stack_lab[:, None].astype(np.float32))
    m_all = torch.from_numpy(stack_m[:, None].astype(np.float32))

    model = ToyNet(config)
    model.train()
    opt = torch.optim.Adam(model.parameters(), lr=config.lr_initial)
    decay = ((config.lr_final / config.lr_initial)
             ** (1.0 / max(config.epochs - 1, 1)))
    sched = torch.optim.lr_scheduler.ExponentialLR(opt, gamma=decay)
    gen = torch.Generator().manual_seed(config.seed)

    def crop(i):
        """Random patch whose center falls inside the pair's ROI disk."""
        hi = n_pix - side
        for _ in range(50):
            r0 = int(torch.randint(0, hi + 1, (1,), generator=gen))
            c0 = int(torch.randint(0, hi + 1, (1,), generator=gen))
            if m_all[i, 0, r0 + side // 2, c0 + side // 2] > 0:
                break
        return tuple(t[i:i + 1, :, r0:r0 + side, c0:c0 + side]
                     for t in (x_all, y_all, m_all))

    losses = []
    n = len(pairs)
    for epoch in range(config.epochs):
        order = torch.randperm(n, generator=gen)
        epoch_loss = 0.0
        n_batches = 0
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            if side < n_pix:
                views = [crop(int(i)) for i in idx]
                x = torch.cat([v[0] for v in views])
                y = torch.cat([v[1] for v in views])
                m = torch.cat([v[2] for v in views])
            else:
                x = x_all[idx]
                y = y_all[idx]
                m = m_all[idx]
            opt.zero_grad()
            loss = (torch.sum(m * (model(x) - y) ** 2)
                    / torch.clamp(m.sum(), min=1.0))
            if not torch.isfinite(loss):
                raise RuntimeError(
                    f"non-finite loss at epoch {epoch}: {loss.item()}")
            loss.backward()
            opt.step()
            epoch_loss += float(loss.detach())
            n_batches += 1
        sched.step()
        losses.append(epoch_loss / n_batches)

    trained_counts = sorted({p.n_det_kept for p in pairs})
    ckpt_path = outdir / f"{run_name}.pt"
    torch.save({
        "state_dict": model.state_dict(),
        "config": config.to_dict(),
        "pair_type": pair_type,
        "input_scale": scale_in,
        "label_scale": scale_lab,
        "trained_counts": trained_counts,
        "receptive_field": config.receptive_field(),
        "n_parameters": model.n_parameters(),
        "n_workers": 0,
        "losses": losses,
    }, ckpt_path)

    loss_path = outdir / f"{run_name}_loss.csv"
    with open(loss_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "loss"])
        for i, value in enumerate(losses):
            writer.writerow([i, f"{value:.10e}"])
    return TrainResult(ckpt_path, loss_path, losses, scale_in, scale_lab,
                       trained_counts)
