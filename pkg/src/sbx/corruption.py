"""Bernoulli masking noise for denoising training."""

from __future__ import annotations

import numpy as np

from .linalg import SeededRng, rng_bernoulli


class MaskingNoise:
    """Zero each input dimension independently with probability ``d``.

    Surviving coordinates are passed through unchanged (no rescaling).  The
    noise owns its random stream, so each call draws a fresh mask.
    """

    def __init__(self, d, rng):
        d = float(d)
        if not 0.0 <= d <= 1.0:
            raise ValueError(f"masking probability must be in [0, 1], got {d}")
        self.d = d
        self.rng = rng if isinstance(rng, SeededRng) else SeededRng(rng)

    def mask(self, shape):
        """Keep-mask of the given shape: 1.0 where the value survives."""
        count = int(np.prod(shape))
        return 1.0 - rng_bernoulli(self.rng, self.d, count).reshape(shape)

    def __call__(self, x):
        return corrupt_batch(self, x)


def corrupt(noise, x):
    x = np.asarray(x, dtype=np.float64)
    if noise.d == 0.0:
        return x.copy()
    keep = noise.mask(x.shape)
    return np.where(keep > 0.0, x, 0.0)


def corrupt_batch(noise, xs):
    """Row-wise masking; one mask per row, resampled on every call."""
    return corrupt(noise, xs)
