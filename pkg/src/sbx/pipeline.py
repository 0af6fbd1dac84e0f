"""End-to-end helpers: power spectra in, features or reconstructions out."""

from __future__ import annotations

import numpy as np

from .core import Network
from .features import WarpSpec, bark_warp, gcn_apply, gcn_fit, gcn_invert
from .formats import SpectralModel
from .linalg import SeededRng
from .training import finetune, pretrain_stack


def split_indices(n, fractions, seed):
    """Shuffle ``range(n)`` and cut it into train/valid/test by fraction."""
    order = SeededRng(seed).permutation(n)
    n_train = int(round(fractions[0] * n))
    n_valid = int(round(fractions[1] * n))
    return order[:n_train], order[n_train:n_train + n_valid], order[n_train + n_valid:]


def warp_for(cfg, n_bins):
    return WarpSpec(int(n_bins), cfg.sample_rate, cfg.warp)


def preprocess(model, power):
    """Power spectra -> normalised warped log spectra the network consumes."""
    return gcn_apply(model.gcn, bark_warp(power, model.warp))


def pretrain_model(cfg, train_power, valid_power=None, layers=None):
    """Fit the preprocessing on ``train_power`` and pretrain every layer.

    ``layers`` restricts training to a subset of the config's layer blocks
    (used by the depth sweep); by default all blocks are used.
    """
    layers = cfg.layers if layers is None else layers
    if len(train_power) == 0:
        raise ValueError("empty dataset")
    warp = warp_for(cfg, train_power.shape[1])
    warped = bark_warp(train_power, warp)
    gcn = gcn_fit(warped, cfg.headroom)
    x_train = gcn_apply(gcn, warped)
    x_valid = None
    if valid_power is not None and len(valid_power):
        x_valid = gcn_apply(gcn, bark_warp(valid_power, warp))
    dims = [layers[0].n_in] + [lc.n_out for lc in layers]
    net, reports = pretrain_stack(x_train, x_valid, dims, [lc.hp for lc in layers],
                                  [lc.enc_act for lc in layers],
                                  [lc.dec_act for lc in layers], return_reports=True)
    meta = {"pretrain": [lc.hp.to_dict() for lc in layers],
            "seeds": [lc.hp.seed for lc in layers]}
    return SpectralModel(net, gcn, warp, meta), reports


def finetune_model(model, hp, train_power, valid_power=None):
    """Fine-tune in place; records the hyperparameters only if any epoch ran."""
    x_train = preprocess(model, train_power)
    x_valid = preprocess(model, valid_power) if valid_power is not None and len(valid_power) else None
    report = finetune(model.network, x_train, x_valid, hp)
    if report.epoch_losses:
        model.meta["finetune"] = hp.to_dict()
    return report


def encode_power(model, power):
    return model.network.encode(preprocess(model, power))


def reconstruct_log(model, power):
    """Reconstruction in the warped natural-log domain (GCN undone)."""
    return gcn_invert(model.gcn, model.network.reconstruct(preprocess(model, power)))


def decode_features(model, features):
    return gcn_invert(model.gcn, model.network.decode(features))


def sub_network(net, n_layers):
    return Network([layer.copy() for layer in net.layers[:n_layers]])
