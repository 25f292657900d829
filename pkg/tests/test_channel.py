import math

import numpy as np
import pytest

from ofdm_papr.channel import (AwgnConfig, add_awgn, ebn0_to_snr_db, gaussian_stream,
                               inband_to_fullband_snr_db, snr_to_ebn0_db)
from ofdm_papr.dsp import PassbandBlock
from ofdm_papr.errors import InvalidInputError


def unit_block(n, seed=0):
    x = np.sqrt(2) * np.cos(np.pi / 2 * np.arange(n) + np.random.default_rng(seed).uniform(0, 6.3))
    return PassbandBlock(x / np.sqrt(np.mean(x ** 2)), 8e6, 2e6)


def test_infinite_snr_is_identity():
    b = unit_block(64)
    assert add_awgn(b, AwgnConfig(math.inf, 5)) is b


def test_zero_block_errors():
    with pytest.raises(InvalidInputError):
        add_awgn(PassbandBlock(np.zeros(16), 8e6, 2e6), AwgnConfig(6.0))


def test_empty_block_errors():
    with pytest.raises(InvalidInputError):
        add_awgn(PassbandBlock(np.zeros(0), 8e6, 2e6), AwgnConfig(6.0))


def test_invalid_config():
    with pytest.raises(InvalidInputError):
        AwgnConfig(float("nan"))
    with pytest.raises(InvalidInputError):
        AwgnConfig(3.0, noise_band_fraction=0.0)


def test_noise_power_at_6_db():
    b = unit_block(2 ** 16)
    n = add_awgn(b, AwgnConfig(6.0, 11)).samples - b.samples
    assert abs(np.mean(n ** 2) / 10 ** -0.6 - 1) < 0.05


def test_deterministic_for_fixed_seed():
    b = unit_block(512)
    a1 = add_awgn(b, AwgnConfig(3.0, 7)).samples
    np.testing.assert_array_equal(a1, add_awgn(b, AwgnConfig(3.0, 7)).samples)
    assert not np.array_equal(a1, add_awgn(b, AwgnConfig(3.0, 8)).samples)


def test_band_fraction_scales_noise():
    b = unit_block(2 ** 16)
    full = add_awgn(b, AwgnConfig(6.0, 3)).samples - b.samples
    quarter = add_awgn(b, AwgnConfig(6.0, 3, 0.25)).samples - b.samples
    np.testing.assert_allclose(quarter, 2 * full, rtol=0, atol=1e-12)


def test_gaussian_stream_basics():
    assert gaussian_stream(1, 0).size == 0
    np.testing.assert_array_equal(gaussian_stream(4, 100), gaussian_stream(4, 100))
    with pytest.raises(InvalidInputError):
        gaussian_stream(1, -1)


def test_gaussian_stream_moments():
    g = gaussian_stream(2024, 10 ** 6)
    assert abs(g.mean()) < 0.004
    assert abs(g.var() - 1) < 0.005


def test_snr_calibration():
    b = unit_block(2 ** 18, 3)
    for snr in (0.0, 6.0, 12.0):
        n = add_awgn(b, AwgnConfig(snr, 99)).samples - b.samples
        realized = 10 * np.log10(np.mean(b.samples ** 2) / np.mean(n ** 2))
        assert abs(realized - snr) < 0.1


def test_noise_uncorrelated_with_signal():
    m = 10 ** 6
    b = PassbandBlock(gaussian_stream(5, m), 8e6, 2e6)
    n = add_awgn(b, AwgnConfig(0.0, 6)).samples - b.samples
    rho = np.corrcoef(b.samples, n)[0, 1]
    assert abs(rho) < 3 / np.sqrt(m)


def test_ebn0_conversion():
    # bps * N / (N + CP) * BW / (fs / 2) = 2 * 0.8 * 0.25 = 0.4
    assert float(snr_to_ebn0_db(0.0, 2, 128, 32, 1e6, 8e6)) == pytest.approx(-10 * np.log10(0.4))
    back = ebn0_to_snr_db(snr_to_ebn0_db(4.2, 4, 128, 32, 1e6, 8e6), 4, 128, 32, 1e6, 8e6)
    assert float(back) == pytest.approx(4.2)
    assert float(inband_to_fullband_snr_db(6.0, 1e6, 8e6)) == pytest.approx(6.0 - 10 * np.log10(4))
