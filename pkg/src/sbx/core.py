"""Tied-weight auto-encoder layers and stacked networks.

A layer holds one weight matrix ``w`` (``m x n``), an encoder bias ``b``
(length ``m``) and a decoder bias ``b_dec`` (length ``n``).  The decoder
always multiplies by ``w.T``; no separate decoder weight exists.

Every function accepts either a single vector or a 2-D batch whose rows are
frames.  Batched results are identical to looping over rows.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .linalg import ShapeError


class Activation(str, enum.Enum):
    TANH = "tanh"
    LINEAR = "linear"

    def __call__(self, a):
        if self is Activation.TANH:
            return np.tanh(a)
        return a

    def derivative_from_output(self, out):
        """Derivative expressed through the activation's output.

        For tanh this is ``sech^2(t) = 1 - tanh(t)^2``.
        """
        if self is Activation.TANH:
            return 1.0 - out * out
        return np.ones_like(out)

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown activation {value!r}; expected one of "
                f"{[a.value for a in cls]}"
            ) from None


@dataclass
class LayerParams:
    w: np.ndarray
    b: np.ndarray
    b_dec: np.ndarray
    enc_act: Activation = Activation.TANH
    dec_act: Activation = Activation.TANH

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64)
        self.b_dec = np.asarray(self.b_dec, dtype=np.float64)
        self.enc_act = Activation.parse(self.enc_act)
        self.dec_act = Activation.parse(self.dec_act)
        if self.w.ndim != 2:
            raise ShapeError(f"weight must be 2-D, got shape {self.w.shape}")
        m, n = self.w.shape
        if self.b.shape != (m,) or self.b_dec.shape != (n,):
            raise ShapeError(
                f"bias shapes {self.b.shape}, {self.b_dec.shape} do not match "
                f"weight {self.w.shape}"
            )

    @property
    def n_in(self):
        return self.w.shape[1]

    @property
    def n_out(self):
        return self.w.shape[0]

    @classmethod
    def zeros(cls, n_in, n_out, enc_act=Activation.TANH, dec_act=Activation.TANH):
        return cls(np.zeros((n_out, n_in)), np.zeros(n_out), np.zeros(n_in),
                   enc_act, dec_act)

    def copy(self):
        return LayerParams(self.w.copy(), self.b.copy(), self.b_dec.copy(),
                           self.enc_act, self.dec_act)


@dataclass
class Network:
    layers: list = field(default_factory=list)

    def __post_init__(self):
        self.layers = list(self.layers)
        for k in range(1, len(self.layers)):
            prev, cur = self.layers[k - 1], self.layers[k]
            if cur.n_in != prev.n_out:
                raise ShapeError(
                    f"layer {k} expects {cur.n_in} inputs but layer {k - 1} "
                    f"produces {prev.n_out}"
                )

    @property
    def dims(self):
        if not self.layers:
            return []
        return [self.layers[0].n_in] + [layer.n_out for layer in self.layers]

    @property
    def n_in(self):
        return self.dims[0]

    @property
    def bottleneck_dim(self):
        return self.dims[-1]

    def copy(self):
        return Network([layer.copy() for layer in self.layers])

    def encode(self, x):
        return encode(self, x)

    def decode(self, y):
        return decode(self, y)

    def reconstruct(self, x):
        return reconstruct(self, x)


def _check_width(x, expected, what):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim not in (1, 2) or x.shape[-1] != expected:
        raise ShapeError(f"{what} expects width {expected}, got shape {x.shape}")
    return x


def encode_layer(layer, x):
    x = _check_width(x, layer.n_in, "encode_layer")
    return layer.enc_act(x @ layer.w.T + layer.b)


def decode_layer(layer, y):
    y = _check_width(y, layer.n_out, "decode_layer")
    return layer.dec_act(y @ layer.w + layer.b_dec)


def encode(net, x):
    if not net.layers:
        raise ValueError("network has no layers")
    h = _check_width(x, net.n_in, "encode")
    for layer in net.layers:
        h = encode_layer(layer, h)
    return h


def decode(net, y):
    if not net.layers:
        raise ValueError("network has no layers")
    u = _check_width(y, net.bottleneck_dim, "decode")
    for layer in reversed(net.layers):
        u = decode_layer(layer, u)
    return u


def reconstruct(net, x):
    return decode(net, encode(net, x))


def loss_mse(x, z):
    """Mean squared error over all entries, ``|x - z|^2 / n`` per frame."""
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if x.shape != z.shape:
        raise ShapeError(f"length mismatch: {x.shape} vs {z.shape}")
    if x.size == 0:
        raise ValueError("loss of empty input is undefined")
    d = x - z
    return float(np.mean(d * d))
