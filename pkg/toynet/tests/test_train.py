"""Training loop: determinism, validation, degenerate fits."""

import csv

import numpy as np
import pytest
import torch

from toynet import ToyNetConfig, load_checkpoint, predict, train
from toynet.data import load_pairs

from helpers import default_meta, write_synthetic_dataset

FAST = dict(stages=2, base_channels=4, epochs=3, batch_size=2)


def _dataset(tmp_path, rng, n=4, size=16, pair_type=1, name="ds",
             make=None):
    triples = []
    for i in range(n):
        if make is None:
            inp = rng.normal(size=(size, size))
            lab = rng.normal(size=(size, size))
        else:
            inp, lab = make(i)
        triples.append((inp, lab, default_meta(
            pair_type=pair_type, n_det_kept=10 * (1 + i % 2))))
    return write_synthetic_dataset(tmp_path / name, triples)


def test_type_mismatch_rejected(tmp_path, rng):
    stem = _dataset(tmp_path, rng, pair_type=1)
    with pytest.raises(ValueError, match="dataset/type mismatch"):
        train(stem, ToyNetConfig(**FAST), 2, tmp_path)


def test_empty_dataset_rejected(tmp_path):
    stem = write_synthetic_dataset(tmp_path / "empty", [])
    with pytest.raises(ValueError, match="empty"):
        train(stem, ToyNetConfig(**FAST), 1, tmp_path)


def test_non_finite_loss_raises(tmp_path, rng):
    def make(i):
        inp = rng.normal(size=(16, 16))
        inp[8, 8] = np.nan  # inside the ROI disk
        return inp, rng.normal(size=(16, 16))
    stem = _dataset(tmp_path, rng, make=make)
    with pytest.raises(RuntimeError, match="non-finite"):
        train(stem, ToyNetConfig(**FAST), 1, tmp_path)


def test_constant_zero_pairs_fit(tmp_path):
    # degenerate regression: all-zero labels drive the output to zero
    def make(i):
        return np.zeros((16, 16)), np.zeros((16, 16))
    stem = _dataset(tmp_path, np.random.default_rng(0), n=6, make=make)
    cfg = ToyNetConfig(stages=1, base_channels=4, epochs=60, batch_size=2,
                       lr_initial=3e-2, lr_final=1e-3)
    result = train(stem, cfg, 1, tmp_path, run_name="zero")
    assert result.losses[-1] < 1e-4
    model, ckpt = load_checkpoint(result.checkpoint_path)
    pair = load_pairs(stem)[0]
    est = predict(model, ckpt, pair)
    assert np.abs(est).max() < np.sqrt(result.losses[-1]) * 10 + 1e-3


def test_seed_reproducibility(tmp_path, rng):
    stem = _dataset(tmp_path, rng)
    cfg = ToyNetConfig(**FAST, seed=7)
    r1 = train(stem, cfg, 1, tmp_path / "a")
    r2 = train(stem, cfg, 1, tmp_path / "b")
    assert r1.losses == r2.losses
    s1 = torch.load(r1.checkpoint_path, weights_only=False)["state_dict"]
    s2 = torch.load(r2.checkpoint_path, weights_only=False)["state_dict"]
    assert all(torch.equal(s1[k], s2[k]) for k in s1)


def test_different_seed_changes_curve(tmp_path, rng):
    stem = _dataset(tmp_path, rng)
    r1 = train(stem, ToyNetConfig(**FAST, seed=1), 1, tmp_path / "a")
    r2 = train(stem, ToyNetConfig(**FAST, seed=2), 1, tmp_path / "b")
    assert r1.losses != r2.losses


def test_artifacts_and_metadata(tmp_path, rng):
    stem = _dataset(tmp_path, rng)
    cfg = ToyNetConfig(**FAST)
    result = train(stem, cfg, 1, tmp_path, run_name="run")
    with open(result.loss_curve_path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["epoch", "loss"]
    assert len(rows) == 1 + cfg.epochs
    assert [float(r[1]) for r in rows[1:]] == pytest.approx(result.losses)
    ckpt = torch.load(result.checkpoint_path, weights_only=False)
    assert ckpt["pair_type"] == 1
    assert ckpt["trained_counts"] == [10, 20]
    assert ckpt["receptive_field"] == cfg.receptive_field()
    assert ckpt["n_workers"] == 0
    assert ckpt["n_parameters"] > 0
    assert result.trained_counts == [10, 20]


def test_patch_cropping_trains(tmp_path, rng):
    # grid larger than the configured patch: random crops, same contract
    stem = _dataset(tmp_path, rng, size=24)
    cfg = ToyNetConfig(stages=2, base_channels=4, epochs=2, batch_size=2,
                       patch=16)
    result = train(stem, cfg, 1, tmp_path)
    assert len(result.losses) == 2
    assert all(np.isfinite(result.losses))
