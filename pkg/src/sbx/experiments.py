"""Desk-scale experiments: depth sweep and auto-encoder vs DCT cepstrum."""

from __future__ import annotations

import logging
import os

import numpy as np

from .config import ConfigError, LayerConfig
from .features import bark_warp, cepstrum_from_logspec, corpus_lsd, logspec_from_cepstrum
from .formats import write_frames
from .pipeline import finetune_model, pretrain_model, preprocess, reconstruct_log, split_indices

logger = logging.getLogger(__name__)

DEPTH_COLUMNS = ["depth", "seed", "train_mse", "valid_mse", "test_mse"]
BASELINE_COLUMNS = ["method", "k", "seed", "mean_lsd", "mean_mse"]


def depth_variant(cfg, depth):
    """First ``depth`` layer blocks, with the last one narrowed to the bottleneck."""
    if not 1 <= depth <= len(cfg.layers):
        raise ValueError(f"depth must be in [1, {len(cfg.layers)}], got {depth}")
    bottleneck = cfg.dims[-1]
    blocks = cfg.layers[:depth]
    out = []
    for j, lc in enumerate(blocks):
        n_in = out[-1].n_out if out else lc.n_in
        n_out = bottleneck if j == depth - 1 else lc.n_out
        out.append(LayerConfig(n_in, n_out, lc.hp, lc.enc_act, lc.dec_act))
    return out


def _train(cfg, power, train, valid, layers=None):
    model, _ = pretrain_model(cfg, power[train], power[valid], layers)
    if cfg.finetune is not None:
        finetune_model(model, cfg.finetune, power[train], power[valid])
    return model


def _mse(model, power):
    if len(power) == 0:
        return float("nan")
    x = preprocess(model, power)
    d = model.network.reconstruct(x) - x
    return float(np.mean(d * d))


def _check_corpus(cfg, power):
    if len(power) == 0:
        raise ValueError("empty dataset")
    if power.shape[1] != cfg.dims[0]:
        raise ConfigError(f"data has {power.shape[1]} bins, config expects {cfg.dims[0]}")


def run_depth(cfg, power, seeds=None):
    """Reconstruction MSE of 1..L layer models sharing one bottleneck width.

    MSE is measured in the normalised domain the networks are trained in.
    Returns one row per (depth, seed), ordered by seed then depth.
    """
    _check_corpus(cfg, power)
    seeds = cfg.experiment.seeds if seeds is None else seeds
    rows = []
    for seed in seeds:
        run_cfg = cfg.with_seed(seed)
        train, valid, test = split_indices(len(power), cfg.experiment.split, seed)
        for depth in range(1, len(cfg.layers) + 1):
            model = _train(run_cfg, power, train, valid, depth_variant(run_cfg, depth))
            row = [depth, seed, _mse(model, power[train]), _mse(model, power[valid]),
                   _mse(model, power[test])]
            logger.info("depth %d seed %d test mse %.6g", depth, seed, row[-1])
            rows.append(row)
    return rows


def run_baseline(cfg, power, seeds=None, dump_dir=None):
    """Held-out LSD and MSE of the auto-encoder against DCT truncation.

    Both methods compress the same warped log spectra to ``k`` numbers and
    are scored in that domain.  With ``dump_dir`` the held-out originals
    and both reconstructions are written as frame files per seed.
    """
    _check_corpus(cfg, power)
    k = cfg.experiment.k if cfg.experiment.k is not None else cfg.dims[-1]
    if k != cfg.dims[-1]:
        raise ConfigError(
            f"unfair comparison: DCT order {k} differs from bottleneck width {cfg.dims[-1]}"
        )
    seeds = cfg.experiment.seeds if seeds is None else seeds
    rows = []
    for seed in seeds:
        run_cfg = cfg.with_seed(seed)
        train, valid, test = split_indices(len(power), cfg.experiment.split, seed)
        if len(test) == 0:
            raise ConfigError("test split is empty")
        model = _train(run_cfg, power, train, valid)
        original = bark_warp(power[test], model.warp)
        recon = {
            "dae": reconstruct_log(model, power[test]),
            "dct": logspec_from_cepstrum(cepstrum_from_logspec(original, k), original.shape[1]),
        }
        for method in ("dae", "dct"):
            mean_lsd, _ = corpus_lsd(original, recon[method], log_domain=True)
            mse = float(np.mean((original - recon[method]) ** 2))
            rows.append([method, k, seed, mean_lsd, mse])
            logger.info("%s k=%d seed %d lsd %.4f dB", method, k, seed, mean_lsd)
        if dump_dir is not None:
            os.makedirs(dump_dir, exist_ok=True)
            write_frames(os.path.join(dump_dir, f"original_seed{seed}.sbfm"), original)
            for method, frames in recon.items():
                write_frames(os.path.join(dump_dir, f"{method}_seed{seed}.sbfm"), frames)
    return rows
