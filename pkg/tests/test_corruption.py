import numpy as np
import pytest

from sbx.corruption import MaskingNoise, corrupt, corrupt_batch
from sbx.linalg import SeededRng


def test_d_zero_is_identity(rng):
    x = rng.normal(size=50)
    np.testing.assert_array_equal(corrupt(MaskingNoise(0.0, 1), x), x)
    xs = rng.normal(size=(5, 8))
    np.testing.assert_array_equal(corrupt_batch(MaskingNoise(0.0, 1), xs), xs)


def test_d_one_zeroes_everything(rng):
    np.testing.assert_array_equal(corrupt(MaskingNoise(1.0, 1), rng.normal(size=50)), 0.0)


def test_masked_fraction_at_table_value():
    # all-ones input, so the masked fraction is the fraction of zeros
    x = np.ones((1000, 1000))
    out = corrupt_batch(MaskingNoise(0.1, SeededRng(5252)), x)
    assert abs(np.mean(out == 0.0) - 0.1) <= 0.001


def test_survivors_are_bit_identical(rng):
    x = rng.normal(size=(200, 30)) + 5.0
    out = corrupt_batch(MaskingNoise(0.3, 3), x)
    kept = out != 0.0
    np.testing.assert_array_equal(out[kept], x[kept])
    assert 0 < kept.mean() < 1


def test_same_state_same_mask_and_fresh_masks_per_call(rng):
    x = rng.normal(size=(100, 100)) + 10.0
    a = corrupt_batch(MaskingNoise(0.1, SeededRng(8)), x)
    b = corrupt_batch(MaskingNoise(0.1, SeededRng(8)), x)
    np.testing.assert_array_equal(a, b)
    noise = MaskingNoise(0.1, SeededRng(8))
    first, second = corrupt_batch(noise, x), corrupt_batch(noise, x)
    # identical masks would need 10^4 agreeing cells: prob (0.1^2 + 0.9^2)^10^4 ~ 1e-863
    assert not np.array_equal(first == 0, second == 0)


def test_per_dimension_rates_within_three_sigma():
    n, d = 10**5, 0.1
    masked = corrupt_batch(MaskingNoise(d, SeededRng(7514)), np.ones((n, 10))) == 0.0
    sigma = np.sqrt(d * (1 - d) / n)
    assert np.all(np.abs(masked.mean(axis=0) - d) <= 3 * sigma)


def test_invalid_probability():
    with pytest.raises(ValueError):
        MaskingNoise(1.2, 0)
    with pytest.raises(ValueError):
        MaskingNoise(-0.1, 0)
