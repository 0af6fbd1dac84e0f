"""scikit-learn compatible wrappers.

These let the auto-encoder and the spectral preprocessing steps sit inside
``sklearn.pipeline.Pipeline`` and work with ``clone``/``get_params``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .core import Activation, Network, decode, encode, reconstruct
from .features import (DEFAULT_HEADROOM, WarpSpec, bark_warp, cepstrum_from_logspec,
                       gcn_apply, gcn_fit, gcn_invert, logspec_from_cepstrum)
from .linalg import SeededRng
from .training import Hyperparams, finetune, pretrain_stack


def _hyperparams(value, default_seed):
    if isinstance(value, Hyperparams):
        return value
    params = dict(value or {})
    params.setdefault("seed", default_seed)
    return Hyperparams(**params)


def _check_width(est, X):
    if X.shape[1] != est.n_features_in_:
        raise ValueError(
            f"X has {X.shape[1]} features, but {type(est).__name__} is expecting "
            f"{est.n_features_in_} features as input"
        )


class DeepDenoisingAutoencoder(TransformerMixin, BaseEstimator):
    """Stacked tied-weight (denoising) auto-encoder.

    ``fit`` runs greedy layer-wise pretraining followed by fine-tuning of the
    whole stack.  ``transform`` returns bottleneck features and
    ``inverse_transform`` maps features back to input space.

    Parameters
    ----------
    hidden_dims : sequence of int
        Widths of the encoder layers; the last one is the bottleneck.
    layer_params : list of dict or Hyperparams, optional
        One block per layer.  Missing seeds default to ``random_state + k``.
        Set ``mask_d`` in a block to make that layer a denoising layer.
    finetune_params : dict or Hyperparams, optional
        Fine-tuning block; ``{"max_epochs": 0}`` skips fine-tuning.
    enc_activation, dec_activation : {"tanh", "linear"}
    validation_fraction : float
        Held out from ``X`` for early stopping when ``X_valid`` is not given.
    random_state : int
    """

    def __init__(self, hidden_dims=(500, 180, 120), layer_params=None,
                 finetune_params=None, enc_activation="tanh", dec_activation="tanh",
                 validation_fraction=0.1, random_state=0):
        self.hidden_dims = hidden_dims
        self.layer_params = layer_params
        self.finetune_params = finetune_params
        self.enc_activation = enc_activation
        self.dec_activation = dec_activation
        self.validation_fraction = validation_fraction
        self.random_state = random_state

    def _split(self, X):
        if not self.validation_fraction:
            return X, None
        n_valid = int(round(len(X) * self.validation_fraction))
        if n_valid == 0 or n_valid >= len(X):
            return X, None
        order = SeededRng(self.random_state).permutation(len(X))
        return X[order[n_valid:]], X[order[:n_valid]]

    def fit(self, X, y=None, X_valid=None):
        X = check_array(X, dtype=np.float64)
        if X_valid is None:
            X_train, X_valid = self._split(X)
        else:
            X_train = X
            X_valid = check_array(X_valid, dtype=np.float64)
        self.n_features_in_ = X.shape[1]

        dims = [X.shape[1]] + [int(d) for d in self.hidden_dims]
        n_layers = len(dims) - 1
        blocks = self.layer_params or [None] * n_layers
        if len(blocks) != n_layers:
            raise ValueError(f"{n_layers} layers need {n_layers} layer_params blocks")
        hps = [_hyperparams(b, self.random_state + k) for k, b in enumerate(blocks)]
        enc = [Activation.parse(self.enc_activation)] * n_layers
        dec = [Activation.parse(self.dec_activation)] * n_layers

        self.network_, self.pretrain_reports_ = pretrain_stack(
            X_train, X_valid, dims, hps, enc, dec, return_reports=True)
        ft = _hyperparams(self.finetune_params, self.random_state + n_layers)
        self.finetune_report_ = finetune(self.network_, X_train, X_valid, ft)
        return self

    @classmethod
    def from_network(cls, network):
        """Wrap an already trained :class:`~sbx.core.Network`."""
        est = cls(hidden_dims=tuple(network.dims[1:]),
                  enc_activation=network.layers[0].enc_act.value,
                  dec_activation=network.layers[0].dec_act.value)
        est.network_ = network
        est.n_features_in_ = network.n_in
        return est

    def transform(self, X):
        check_is_fitted(self, "network_")
        X = check_array(X, dtype=np.float64)
        _check_width(self, X)
        return encode(self.network_, X)

    def inverse_transform(self, Z):
        check_is_fitted(self, "network_")
        Z = check_array(Z, dtype=np.float64)
        return decode(self.network_, Z)

    def reconstruct(self, X):
        check_is_fitted(self, "network_")
        X = check_array(X, dtype=np.float64)
        _check_width(self, X)
        return reconstruct(self.network_, X)

    def score(self, X, y=None):
        """Negative reconstruction MSE (higher is better)."""
        X = check_array(X, dtype=np.float64)
        d = self.reconstruct(X) - X
        return -float(np.mean(d * d))


class BarkWarp(TransformerMixin, BaseEstimator):
    """Power spectra -> Bark-warped natural-log power.  Stateless."""

    def __init__(self, sample_rate=48000.0, warp_kind="bark"):
        self.sample_rate = sample_rate
        self.warp_kind = warp_kind

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        self.n_features_in_ = X.shape[1]
        self.spec_ = WarpSpec(X.shape[1], float(self.sample_rate), self.warp_kind)
        return self

    def transform(self, X):
        check_is_fitted(self, "spec_")
        X = check_array(X, dtype=np.float64)
        _check_width(self, X)
        if np.any(X < 0):
            raise ValueError("power spectra must be nonnegative")
        return bark_warp(X, self.spec_)


class GlobalContrastNormalizer(TransformerMixin, BaseEstimator):
    """Subtract the corpus mean and divide by a corpus-wide scale."""

    def __init__(self, headroom=DEFAULT_HEADROOM):
        self.headroom = headroom

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        self.n_features_in_ = X.shape[1]
        self.stats_ = gcn_fit(X, self.headroom)
        return self

    def transform(self, X):
        check_is_fitted(self, "stats_")
        return gcn_apply(self.stats_, check_array(X, dtype=np.float64))

    def inverse_transform(self, X):
        check_is_fitted(self, "stats_")
        return gcn_invert(self.stats_, check_array(X, dtype=np.float64))


class DctCepstrum(TransformerMixin, BaseEstimator):
    """Truncated orthonormal DCT-II of log spectra (the linear baseline)."""

    def __init__(self, order=120):
        self.order = order

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        if not 1 <= self.order <= X.shape[1]:
            raise ValueError(f"order must be in [1, {X.shape[1]}], got {self.order}")
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, dtype=np.float64)
        _check_width(self, X)
        return cepstrum_from_logspec(X, self.order)

    def inverse_transform(self, C):
        check_is_fitted(self, "n_features_in_")
        return logspec_from_cepstrum(check_array(C, dtype=np.float64), self.n_features_in_)
