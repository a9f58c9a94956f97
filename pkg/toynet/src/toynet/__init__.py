"""Desk-scale encoder-decoder training harness for interior-CT datasets.

Consumes the manifest + blob dataset file format, trains small U-shaped
networks on (input, label) image pairs, and measures how reconstruction
quality generalizes across unseen detector-truncation levels.
"""

from .data import DatasetFormatError, Pair, load_pairs, roi_mask
from .evaluate import (GeneralizationReport, evaluate_generalization,
                       load_checkpoint, predict, psnr_standard)
from .model import ToyNet, ToyNetConfig
from .train import TrainResult, train

__all__ = [
    "DatasetFormatError",
    "Pair",
    "load_pairs",
    "roi_mask",
    "ToyNet",
    "ToyNetConfig",
    "TrainResult",
    "train",
    "GeneralizationReport",
    "evaluate_generalization",
    "load_checkpoint",
    "predict",
    "psnr_standard",
]

__version__ = "0.1.0"
