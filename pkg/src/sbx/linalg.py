"""Dense float64 linear algebra and seeded random streams.

Matrices and vectors are plain ``numpy.ndarray`` objects of dtype float64.
The helpers here add the shape checks and error messages the rest of the
package relies on.

Random numbers come from numpy's PCG64 bit generator.  The generator name is
written into every model file (see :data:`RNG_ALGORITHM`) because weight
draws, shuffles and masks are only reproducible under the same generator.
"""

from __future__ import annotations

import numpy as np

RNG_ALGORITHM = "numpy.PCG64"


class ShapeError(ValueError):
    """Raised when operand shapes are incompatible."""


def as_matrix(a, name="matrix"):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {a.shape}")
    return a


def as_vector(a, name="vector"):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 1:
        raise ShapeError(f"{name} must be 1-D, got shape {a.shape}")
    return a


def check_finite(a, name="array"):
    if not np.all(np.isfinite(a)):
        raise FloatingPointError(f"{name} contains NaN or Inf")
    return a


def matmul(a, b):
    """Matrix product ``a @ b`` with an explicit shape check."""
    a = as_matrix(a, "left operand")
    b = as_matrix(b, "right operand")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(
            f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}"
        )
    return a @ b


def transpose(a):
    """Transpose; 1-D input is treated as a single row."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a[np.newaxis, :]
    return as_matrix(a).T.copy()


class SeededRng:
    """Reproducible random stream keyed by a 64-bit unsigned seed."""

    algorithm = RNG_ALGORITHM

    def __init__(self, seed):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self._gen = np.random.Generator(np.random.PCG64(seed))

    def spawn(self, n):
        """Independent child streams derived from this stream's seed."""
        children = np.random.SeedSequence(self.seed).spawn(n)
        out = []
        for child in children:
            rng = SeededRng.__new__(SeededRng)
            rng.seed = self.seed
            rng._gen = np.random.Generator(np.random.PCG64(child))
            out.append(rng)
        return out

    @property
    def generator(self):
        return self._gen

    def random(self, size):
        return self._gen.random(size)

    def permutation(self, n):
        return self._gen.permutation(n)


def rng_uniform(rng, lo, hi, count):
    """``count`` samples from U[lo, hi)."""
    if not lo < hi:
        raise ValueError(f"need lo < hi, got lo={lo}, hi={hi}")
    u = rng.random(int(count))
    out = lo + (hi - lo) * u
    # rounding can land exactly on hi for wide intervals
    return np.minimum(out, np.nextafter(hi, lo))


def rng_bernoulli(rng, p, count):
    """``count`` draws from Bernoulli(p) as float64 0.0/1.0."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must be in [0, 1], got {p}")
    return (rng.random(int(count)) < p).astype(np.float64)
