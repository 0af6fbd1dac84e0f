"""Spectral preprocessing, the DCT cepstrum baseline and distortion metrics.

Frames enter as linear power spectra with ``n_bins`` points covering
0 Hz .. Nyquist.  :func:`bark_warp` turns them into natural-log power
resampled uniformly on the Bark axis; everything downstream (global
contrast normalisation, the auto-encoder, the DCT baseline) works in that
warped log domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .linalg import ShapeError

POWER_FLOOR = 1e-10
LOG_FLOOR = math.log(POWER_FLOOR)
GCN_SCALE_FLOOR = 1e-8
DEFAULT_HEADROOM = 0.95


def hz_to_bark(f):
    """Traunmueller's approximation ``26.81 f / (1960 + f) - 0.53``."""
    f = np.asarray(f, dtype=np.float64)
    return 26.81 * f / (1960.0 + f) - 0.53


def bark_to_hz(z):
    z = np.asarray(z, dtype=np.float64)
    return 1960.0 * (z + 0.53) / (26.28 - z)


@dataclass(frozen=True)
class WarpSpec:
    n_bins: int = 2049
    sample_rate: float = 48000.0
    warp_kind: str = "bark"

    def __post_init__(self):
        if self.warp_kind not in ("bark", "none"):
            raise ValueError(f"warp_kind must be 'bark' or 'none', got {self.warp_kind!r}")
        if self.n_bins < 2:
            raise ValueError("need at least two frequency bins")
        if self.sample_rate <= 0:
            raise ValueError("sample rate must be positive")

    def source_positions(self):
        """Fractional source-bin index sampled by each output bin."""
        n = self.n_bins
        if self.warp_kind == "none":
            return np.arange(n, dtype=np.float64)
        nyquist = self.sample_rate / 2.0
        barks = np.linspace(hz_to_bark(0.0), hz_to_bark(nyquist), n)
        pos = bark_to_hz(barks) / nyquist * (n - 1)
        pos[0], pos[-1] = 0.0, n - 1.0
        return np.clip(pos, 0.0, n - 1.0)


def log_power(frames):
    return np.log(np.maximum(np.asarray(frames, dtype=np.float64), POWER_FLOOR))


def bark_warp(frame, spec):
    """Warped natural-log power spectrum, same length as the input.

    Accepts one frame or a matrix of frames (rows).  Log power is linearly
    interpolated between neighbouring source bins.
    """
    frame = np.asarray(frame, dtype=np.float64)
    if frame.shape[-1] != spec.n_bins:
        raise ShapeError(f"frame has {frame.shape[-1]} bins, warp expects {spec.n_bins}")
    logspec = log_power(frame)
    if spec.warp_kind == "none":
        return logspec
    pos = spec.source_positions()
    lo = np.minimum(np.floor(pos).astype(int), spec.n_bins - 2)
    frac = pos - lo
    return logspec[..., lo] * (1.0 - frac) + logspec[..., lo + 1] * frac


@dataclass(frozen=True)
class GcnStats:
    mean: float
    scale: float
    k_range: float = 1.0

    def __post_init__(self):
        if not self.scale > 0 or not self.k_range > 0:
            raise ValueError("GCN scale and k_range must be positive")


def gcn_fit(frames, headroom=DEFAULT_HEADROOM):
    """Corpus-level mean and standard deviation over all entries.

    With ``headroom`` set, ``k_range`` is chosen so the fitted corpus maps
    into ``[-headroom, headroom]``, leaving room for tanh outputs.  With
    ``headroom=None`` the transform is plain standardisation.
    """
    frames = np.asarray(frames, dtype=np.float64)
    if frames.size == 0:
        raise ValueError("cannot fit GCN on an empty matrix")
    mean = float(np.mean(frames))
    scale = max(float(np.std(frames)), GCN_SCALE_FLOOR)
    k_range = 1.0
    if headroom is not None:
        if not 0 < headroom <= 1:
            raise ValueError(f"headroom must be in (0, 1], got {headroom}")
        peak = float(np.max(np.abs(frames - mean))) / scale
        k_range = max(peak / headroom, 1e-12)
    return GcnStats(mean, scale, k_range)


def gcn_apply(stats, x):
    return (np.asarray(x, dtype=np.float64) - stats.mean) / (stats.scale * stats.k_range)


def gcn_invert(stats, x):
    return np.asarray(x, dtype=np.float64) * (stats.scale * stats.k_range) + stats.mean


def cepstrum_from_logspec(logspec, order):
    """Orthonormal DCT-II of the log spectrum, first ``order`` coefficients."""
    logspec = np.asarray(logspec, dtype=np.float64)
    n = logspec.shape[-1]
    if not 1 <= order <= n:
        raise ValueError(f"order must be in [1, {n}], got {order}")
    return scipy.fft.dct(logspec, type=2, norm="ortho", axis=-1)[..., :order]


def logspec_from_cepstrum(cep, n_bins):
    """Zero-pad to ``n_bins`` coefficients and invert the orthonormal DCT-II."""
    cep = np.asarray(cep, dtype=np.float64)
    order = cep.shape[-1]
    if order > n_bins:
        raise ValueError(f"{order} coefficients do not fit into {n_bins} bins")
    padded = np.zeros(cep.shape[:-1] + (n_bins,))
    padded[..., :order] = cep
    return scipy.fft.idct(padded, type=2, norm="ortho", axis=-1)


def lsd_from_log(a_log, b_log):
    """LSD in dB between spectra given as natural-log power.

    Values are clamped at the log of the power floor first.  Works row-wise
    on matrices, returning one value per row.
    """
    a_log = np.maximum(np.asarray(a_log, dtype=np.float64), LOG_FLOOR)
    b_log = np.maximum(np.asarray(b_log, dtype=np.float64), LOG_FLOOR)
    if a_log.shape != b_log.shape:
        raise ShapeError(f"length mismatch: {a_log.shape} vs {b_log.shape}")
    db = (20.0 / math.log(10.0)) * (a_log - b_log)
    return np.sqrt(np.mean(db * db, axis=-1))


def log_spectral_distortion(a, b):
    """RMS over bins of ``20 log10(a_i / b_i)``, for linear power frames."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeError(f"length mismatch: {a.shape} vs {b.shape}")
    if a.ndim != 1:
        raise ShapeError("log_spectral_distortion compares two single frames")
    db = 20.0 * (np.log10(np.maximum(a, POWER_FLOOR)) - np.log10(np.maximum(b, POWER_FLOOR)))
    return float(np.sqrt(np.mean(db * db)))


def corpus_lsd(originals, reconstructions, log_domain=False):
    """Mean and per-frame LSD over two equally long lists of frames."""
    originals = np.asarray(originals, dtype=np.float64)
    reconstructions = np.asarray(reconstructions, dtype=np.float64)
    if len(originals) != len(reconstructions):
        raise ShapeError(
            f"frame count mismatch: {len(originals)} vs {len(reconstructions)}"
        )
    if len(originals) == 0:
        raise ValueError("no frames to compare")
    if log_domain:
        per_frame = lsd_from_log(originals, reconstructions)
    else:
        per_frame = np.array([log_spectral_distortion(a, b)
                              for a, b in zip(originals, reconstructions)])
    return float(np.mean(per_frame)), per_frame
