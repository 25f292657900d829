"""Additive white Gaussian noise keyed to measured signal power."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dsp import PassbandBlock
from .errors import InvalidInputError


@dataclass(frozen=True)
class AwgnConfig:
    """Noise level as signal power over noise power, in dB.

    The noise power is counted over ``noise_band_fraction`` of ``[0, fs/2]``;
    the default 1.0 refers ``snr_db`` to the total noise power per real
    sample. ``math.inf`` disables the noise entirely.
    """

    snr_db: float
    seed: int = 0
    noise_band_fraction: float = 1.0

    def __post_init__(self):
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise InvalidInputError(f"invalid snr_db {self.snr_db}")
        if not 0 < self.noise_band_fraction <= 1:
            raise InvalidInputError("noise_band_fraction must lie in (0, 1]")


def gaussian_stream(seed: int, count: int) -> np.ndarray:
    """Standard normal samples from PCG64 (numpy's ziggurat sampler)."""
    if count < 0:
        raise InvalidInputError("count must be >= 0")
    rng = np.random.Generator(np.random.PCG64(int(seed) & 0xFFFF_FFFF_FFFF_FFFF))
    return rng.standard_normal(int(count))


def add_awgn(block: PassbandBlock, config: AwgnConfig) -> PassbandBlock:
    if len(block) == 0:
        raise InvalidInputError("cannot add noise to an empty block")
    if config.snr_db == math.inf:
        return block
    power = float(np.mean(block.samples ** 2))
    if power == 0.0:
        raise InvalidInputError("signal power is zero; SNR is undefined")
    std = math.sqrt(power / (10.0 ** (config.snr_db / 10.0) * config.noise_band_fraction))
    noise = std * gaussian_stream(config.seed, len(block))
    return block.replace(block.samples + noise)


def snr_to_ebn0_db(snr_db, bits_per_symbol, num_subcarriers, cp_len, bandwidth_hz, sample_rate_hz):
    """Eb/N0 for a passband SNR measured over ``[0, fs/2]``.

    ``Eb/N0 = SNR - 10 log10(bps * N / (N + CP) * BW / (fs / 2))``; Eb counts
    the cyclic-prefix energy as spent per bit.
    """
    factor = (bits_per_symbol * num_subcarriers / (num_subcarriers + cp_len)
              * bandwidth_hz / (sample_rate_hz / 2))
    return np.asarray(snr_db, dtype=float) - 10.0 * np.log10(factor)


def inband_to_fullband_snr_db(snr_db, bandwidth_hz, sample_rate_hz):
    """Convert an SNR referred to the occupied band to one over ``[0, fs/2]``."""
    return np.asarray(snr_db, dtype=float) + 10.0 * np.log10(bandwidth_hz / (sample_rate_hz / 2))


def ebn0_to_snr_db(ebn0_db, bits_per_symbol, num_subcarriers, cp_len, bandwidth_hz, sample_rate_hz):
    factor = (bits_per_symbol * num_subcarriers / (num_subcarriers + cp_len)
              * bandwidth_hz / (sample_rate_hz / 2))
    return np.asarray(ebn0_db, dtype=float) + 10.0 * np.log10(factor)
