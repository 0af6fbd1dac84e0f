"""Greedy layer-wise pretraining and backpropagation fine-tuning.

The objective everywhere is the squared reconstruction error averaged over
the minibatch and over dimensions, so learning rates do not need rescaling
when the layer width changes.  Updates use classical momentum::

    v <- momentum * v - lr * grad
    theta <- theta + v

Each run derives three independent streams from its seed: weight
initialisation, minibatch shuffling and masking noise.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .core import Activation, LayerParams, Network, encode, encode_layer
from .corruption import MaskingNoise, corrupt_batch
from .linalg import SeededRng, ShapeError, rng_uniform

logger = logging.getLogger(__name__)


@dataclass
class Hyperparams:
    lr: float = 0.01
    momentum: float = 0.9
    batch_size: int = 100
    seed: int = 0
    mask_d: float | None = None
    max_epochs: int = 1000
    patience: int = 20

    def __post_init__(self):
        if not self.lr > 0:
            raise ValueError(f"learning rate must be positive, got {self.lr}")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError(f"momentum must be in [0, 1), got {self.momentum}")
        if int(self.batch_size) < 1:
            raise ValueError(f"batch size must be >= 1, got {self.batch_size}")
        if int(self.patience) < 1:
            raise ValueError(f"patience must be >= 1, got {self.patience}")
        if int(self.max_epochs) < 0:
            raise ValueError(f"max_epochs must be >= 0, got {self.max_epochs}")
        if self.mask_d is not None and not 0.0 <= self.mask_d <= 1.0:
            raise ValueError(f"masking probability must be in [0, 1], got {self.mask_d}")
        self.batch_size = int(self.batch_size)
        self.patience = int(self.patience)
        self.max_epochs = int(self.max_epochs)
        self.seed = int(self.seed)

    def to_dict(self):
        return asdict(self)


@dataclass
class TrainReport:
    """Per-epoch losses of one training run.

    ``best_valid_loss`` is the minimum over ``initial_valid_loss`` and every
    recorded validation loss; the trained parameters are the ones that
    achieved it.  ``best_epoch`` is 0 when no epoch improved on the start.
    """

    epoch_losses: list = field(default_factory=list)
    initial_valid_loss: float = math.inf
    best_valid_loss: float = math.inf
    best_epoch: int = 0
    stopped_epoch: int = 0

    @property
    def train_losses(self):
        return [t for t, _ in self.epoch_losses]

    @property
    def valid_losses(self):
        return [v for _, v in self.epoch_losses]

    def running_best(self):
        best = self.initial_valid_loss
        out = []
        for v in self.valid_losses:
            best = min(best, v)
            out.append(best)
        return out


@dataclass
class GradientSet:
    dw: list
    db: list
    db_dec: list

    @classmethod
    def zeros_like(cls, net):
        return cls([np.zeros_like(layer.w) for layer in net.layers],
                   [np.zeros_like(layer.b) for layer in net.layers],
                   [np.zeros_like(layer.b_dec) for layer in net.layers])

    def check_congruent(self, net):
        if len(self.dw) != len(net.layers):
            raise ShapeError(f"gradient has {len(self.dw)} layers, network has {len(net.layers)}")
        for k, layer in enumerate(net.layers):
            if (self.dw[k].shape != layer.w.shape or self.db[k].shape != layer.b.shape
                    or self.db_dec[k].shape != layer.b_dec.shape):
                raise ShapeError(f"gradient shapes for layer {k} do not match parameters")


def backprop_gradients(net, x_in, target):
    """Loss and exact gradients of the batch-mean squared error.

    ``x_in`` is what the encoder sees (possibly corrupted); ``target`` is the
    clean frame the reconstruction is compared against.  Both may be a single
    vector or a batch of rows.  The returned loss is
    ``mean((reconstruct(x_in) - target)**2)`` and the gradients are taken of
    that same quantity.  Because the decoder reuses ``w.T``, each ``dw``
    is the sum of an encoder-path term and a transposed decoder-path term.
    """
    x_in = np.atleast_2d(np.asarray(x_in, dtype=np.float64))
    target = np.atleast_2d(np.asarray(target, dtype=np.float64))
    if not net.layers:
        raise ValueError("network has no layers")
    if x_in.shape != target.shape or x_in.shape[1] != net.n_in:
        raise ShapeError(
            f"input {x_in.shape} and target {target.shape} must both have "
            f"width {net.n_in}"
        )

    # forward, keeping every activation
    hs = [x_in]
    for layer in net.layers:
        hs.append(encode_layer(layer, hs[-1]))
    us = [hs[-1]]
    for layer in reversed(net.layers):
        us.append(layer.dec_act(us[-1] @ layer.w + layer.b_dec))
    z = us[-1]

    diff = z - target
    loss = float(np.mean(diff * diff))
    grads = GradientSet.zeros_like(net)

    # decoder path, output side first; us[j] feeds the decoder of layer L-1-j
    n_layers = len(net.layers)
    delta = 2.0 * diff / diff.size
    for j in reversed(range(n_layers)):
        k = n_layers - 1 - j
        layer = net.layers[k]
        out, inp = us[j + 1], us[j]
        da = delta * layer.dec_act.derivative_from_output(out)
        grads.db_dec[k] = da.sum(axis=0)
        grads.dw[k] = inp.T @ da
        delta = da @ layer.w.T

    # encoder path, bottleneck first
    for k in range(n_layers - 1, -1, -1):
        layer = net.layers[k]
        dc = delta * layer.enc_act.derivative_from_output(hs[k + 1])
        grads.db[k] = dc.sum(axis=0)
        grads.dw[k] += dc.T @ hs[k]
        delta = dc @ layer.w

    return loss, grads


def sgd_step(net, grads, velocity, hp):
    """One classical-momentum update, applied in place."""
    grads.check_congruent(net)
    velocity.check_congruent(net)
    for k, layer in enumerate(net.layers):
        for param, g, v in ((layer.w, grads.dw[k], velocity.dw[k]),
                            (layer.b, grads.db[k], velocity.db[k]),
                            (layer.b_dec, grads.db_dec[k], velocity.db_dec[k])):
            v *= hp.momentum
            v -= hp.lr * g
            param += v
    return net, velocity


def init_layer(n_in, n_out, rng, enc_act=Activation.TANH, dec_act=Activation.TANH):
    """Uniform weights in +-sqrt(6 / (n_in + n_out)), zero biases."""
    r = math.sqrt(6.0 / (n_in + n_out))
    w = rng_uniform(rng, -r, r, n_in * n_out).reshape(n_out, n_in)
    return LayerParams(w, np.zeros(n_out), np.zeros(n_in), enc_act, dec_act)


def _as_frames(x, width, name):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ShapeError(f"{name} must be a 2-D frame matrix, got shape {x.shape}")
    if x.shape[1] != width:
        raise ShapeError(f"{name} has {x.shape[1]} columns, expected {width}")
    return x


def _restore(net, params):
    for dst, src in zip(net.layers, params.layers):
        dst.w[...] = src.w
        dst.b[...] = src.b
        dst.b_dec[...] = src.b_dec


def _fit(net, train, valid, hp, noise, shuffle_rng, label):
    """Minibatch momentum SGD with patience-based early stopping.

    ``net`` ends up holding the best-validation parameters.
    """
    n = train.shape[0]
    velocity = GradientSet.zeros_like(net)
    monitor = valid if valid is not None and len(valid) else train

    def valid_loss():
        d = net.reconstruct(monitor) - monitor
        return float(np.mean(d * d))

    report = TrainReport()
    report.initial_valid_loss = report.best_valid_loss = valid_loss()
    best_params = net.copy()
    since_best = 0

    for epoch in range(1, hp.max_epochs + 1):
        order = shuffle_rng.permutation(n)
        total = 0.0
        for start in range(0, n, hp.batch_size):
            batch = train[order[start:start + hp.batch_size]]
            x_in = corrupt_batch(noise, batch) if noise is not None else batch
            loss, grads = backprop_gradients(net, x_in, batch)
            sgd_step(net, grads, velocity, hp)
            total += loss * len(batch)
        train_loss = total / n
        v = valid_loss()
        if not (math.isfinite(train_loss) and math.isfinite(v)):
            raise FloatingPointError(
                f"{label}: training diverged at epoch {epoch}; lower the learning rate"
            )
        report.epoch_losses.append((train_loss, v))
        report.stopped_epoch = epoch
        logger.debug("%s epoch %d train %.6g valid %.6g", label, epoch, train_loss, v)

        if v < report.best_valid_loss:
            report.best_valid_loss = v
            report.best_epoch = epoch
            best_params = net.copy()
            since_best = 0
        else:
            since_best += 1
            if since_best >= hp.patience:
                break

    _restore(net, best_params)
    return report


def _streams(seed):
    init_rng, shuffle_rng, mask_rng = SeededRng(seed).spawn(3)
    return init_rng, shuffle_rng, mask_rng


def pretrain_layer(train, valid, in_dim, out_dim, hp,
                   enc_act=Activation.TANH, dec_act=Activation.TANH):
    """Train one tied auto-encoder layer to reconstruct its clean input.

    When ``hp.mask_d`` is set, inputs are masked afresh for every minibatch
    while the loss is still measured against the clean rows.
    """
    train = _as_frames(train, in_dim, "training data")
    if train.shape[0] == 0:
        raise ValueError("empty dataset")
    if valid is not None:
        valid = _as_frames(valid, in_dim, "validation data")
    init_rng, shuffle_rng, mask_rng = _streams(hp.seed)
    layer = init_layer(in_dim, out_dim, init_rng,
                       Activation.parse(enc_act), Activation.parse(dec_act))
    noise = MaskingNoise(hp.mask_d, mask_rng) if hp.mask_d else None
    net = Network([layer])
    report = _fit(net, train, valid, hp, noise, shuffle_rng, f"pretrain {in_dim}-{out_dim}")
    return net.layers[0], report


def encode_dataset(layer_or_net, xs):
    """Encode clean rows through one layer or a whole network."""
    if isinstance(layer_or_net, LayerParams):
        return encode_layer(layer_or_net, _as_frames(xs, layer_or_net.n_in, "input"))
    return encode(layer_or_net, _as_frames(xs, layer_or_net.n_in, "input"))


def pretrain_stack(train, valid, dims, hps, enc_acts=None, dec_acts=None,
                   return_reports=False):
    """Greedy layer-wise pretraining of a ``len(dims) - 1`` layer network.

    Layer ``k`` is trained on the clean encodings produced by layers
    ``0..k-1``; earlier layers are frozen while it trains.
    """
    dims = [int(d) for d in dims]
    if len(dims) < 2:
        raise ValueError(f"need at least two layer widths, got {dims}")
    n_layers = len(dims) - 1
    if len(hps) != n_layers:
        raise ValueError(f"{n_layers} layers need {n_layers} hyperparameter blocks, got {len(hps)}")
    enc_acts = list(enc_acts or [Activation.TANH] * n_layers)
    dec_acts = list(dec_acts or [Activation.TANH] * n_layers)

    x_train = _as_frames(train, dims[0], "training data")
    x_valid = _as_frames(valid, dims[0], "validation data") if valid is not None else None
    layers, reports = [], []
    for k in range(n_layers):
        layer, report = pretrain_layer(x_train, x_valid, dims[k], dims[k + 1], hps[k],
                                       enc_acts[k], dec_acts[k])
        layers.append(layer)
        reports.append(report)
        if k + 1 < n_layers:
            x_train = encode_dataset(layer, x_train)
            if x_valid is not None:
                x_valid = encode_dataset(layer, x_valid)
    net = Network(layers)
    return (net, reports) if return_reports else net


def finetune(net, train, valid, hp):
    """Backpropagate the full reconstruction error through every layer.

    Inputs are clean unless ``hp.mask_d`` is set.  ``net`` is updated in
    place and left at its best-validation parameters.
    """
    train = _as_frames(train, net.n_in, "training data")
    if train.shape[0] == 0:
        raise ValueError("empty dataset")
    if valid is not None:
        valid = _as_frames(valid, net.n_in, "validation data")
    _, shuffle_rng, mask_rng = _streams(hp.seed)
    noise = MaskingNoise(hp.mask_d, mask_rng) if hp.mask_d else None
    return _fit(net, train, valid, hp, noise, shuffle_rng, "finetune")
