"""Tied-weight deep denoising auto-encoders for spectral bottleneck features."""

from .core import Activation, LayerParams, Network, decode, encode, reconstruct
from .estimators import BarkWarp, DctCepstrum, DeepDenoisingAutoencoder, GlobalContrastNormalizer
from .training import Hyperparams, TrainReport, finetune, pretrain_stack

__version__ = "0.1.0"

__all__ = [
    "Activation", "LayerParams", "Network", "encode", "decode", "reconstruct",
    "Hyperparams", "TrainReport", "pretrain_stack", "finetune",
    "DeepDenoisingAutoencoder", "BarkWarp", "GlobalContrastNormalizer", "DctCepstrum",
]
