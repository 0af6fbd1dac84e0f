"""Synthetic spectral envelopes for desk-scale experiments."""

from __future__ import annotations

import numpy as np

from .linalg import SeededRng


def make_synthetic_corpus(seed, n_frames, n_bins, width_range=(0.03, 0.08),
                          noise_std=0.05):
    """Random smooth power spectra, one frame per row.

    Each log-power envelope is an offset and a downward spectral tilt plus
    3 to 6 Gaussian bumps (centre, width and height drawn per bump) and a
    little white noise.  Widths are fractions of the frequency axis.  The
    returned values are linear power, so every bin is positive.
    """
    gen = SeededRng(seed).generator
    u = np.linspace(0.0, 1.0, int(n_bins))
    out = np.empty((int(n_frames), int(n_bins)))
    for i in range(int(n_frames)):
        k = int(gen.integers(3, 7))
        centres = gen.uniform(0.0, 1.0, k)
        widths = gen.uniform(width_range[0], width_range[1], k)
        heights = gen.uniform(1.0, 4.0, k)
        offset = gen.normal(0.0, 0.5)
        tilt = gen.uniform(1.0, 4.0)
        bumps = heights[:, None] * np.exp(-0.5 * ((u - centres[:, None]) / widths[:, None]) ** 2)
        out[i] = offset - tilt * u + bumps.sum(axis=0) + noise_std * gen.normal(size=u.size)
    return np.exp(out)
