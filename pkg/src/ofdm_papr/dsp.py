"""Sample containers, unitary DFT pair, zero-pad interpolation and carrier mixing.

Complex samples are stored as ``complex128`` numpy arrays and real passband
samples as ``float64``. Every block freezes its array on construction so
blocks can be shared freely between workers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError


def _frozen(values, dtype):
    arr = np.array(values, dtype=dtype)
    if arr.ndim != 1:
        raise InvalidInputError("samples must be a 1-D vector")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("samples must be finite")
    arr.flags.writeable = False
    return arr


def _positive(name, value):
    if not (math.isfinite(value) and value > 0):
        raise InvalidInputError(f"{name} must be positive and finite, got {value}")


@dataclass(frozen=True)
class BasebandBlock:
    samples: np.ndarray = field(repr=False)
    sample_rate_hz: float

    def __post_init__(self):
        object.__setattr__(self, "samples", _frozen(self.samples, np.complex128))
        _positive("sample_rate_hz", self.sample_rate_hz)

    def __len__(self):
        return self.samples.size


@dataclass(frozen=True)
class SpectrumBlock:
    bins: np.ndarray = field(repr=False)
    bin_spacing_hz: float

    def __post_init__(self):
        object.__setattr__(self, "bins", _frozen(self.bins, np.complex128))
        _positive("bin_spacing_hz", self.bin_spacing_hz)

    def __len__(self):
        return self.bins.size


@dataclass(frozen=True)
class PassbandBlock:
    samples: np.ndarray = field(repr=False)
    sample_rate_hz: float
    carrier_freq_hz: float

    def __post_init__(self):
        object.__setattr__(self, "samples", _frozen(self.samples, np.float64))
        _positive("sample_rate_hz", self.sample_rate_hz)
        _positive("carrier_freq_hz", self.carrier_freq_hz)
        if self.carrier_freq_hz >= self.sample_rate_hz / 2:
            raise InvalidInputError(
                f"carrier {self.carrier_freq_hz} Hz aliases at fs={self.sample_rate_hz} Hz")

    def __len__(self):
        return self.samples.size

    def replace(self, samples) -> "PassbandBlock":
        return PassbandBlock(samples, self.sample_rate_hz, self.carrier_freq_hz)


def dft_unitary(block: BasebandBlock) -> SpectrumBlock:
    """``X[k] = M**-0.5 * sum_m x[m] exp(-2j pi m k / M)``."""
    m = len(block)
    if m == 0:
        raise InvalidInputError("cannot transform an empty block")
    return SpectrumBlock(np.fft.fft(block.samples, norm="ortho"), block.sample_rate_hz / m)


def idft_unitary(spectrum: SpectrumBlock) -> BasebandBlock:
    m = len(spectrum)
    if m == 0:
        raise InvalidInputError("cannot transform an empty spectrum")
    return BasebandBlock(np.fft.ifft(spectrum.bins, norm="ortho"), spectrum.bin_spacing_hz * m)


def zero_pad_interpolate(symbols: SpectrumBlock, L: int, symmetric: bool = False) -> SpectrumBlock:
    """Insert ``N(L-1)`` zeros in the middle of an ``N``-bin spectrum.

    By default bins ``0..N/2`` stay at the bottom and bins ``N/2+1..N-1``
    move to the top, i.e. the Nyquist-adjacent symbol ``X[N/2]`` is placed
    with the positive frequencies (``N/2 + 1`` low bins, ``N/2 - 1`` high).
    ``symmetric=True`` instead splits the block evenly, ``N/2`` bins each side.
    """
    n = len(symbols)
    if n == 0 or n % 2:
        raise InvalidInputError(f"symbol block length must be even and nonzero, got {n}")
    if int(L) != L or L < 1:
        raise InvalidInputError(f"oversampling factor must be an integer >= 1, got {L}")
    L = int(L)
    out = np.zeros(n * L, dtype=np.complex128)
    split = n // 2 if symmetric else n // 2 + 1
    out[:split] = symbols.bins[:split]
    out[n * L - (n - split):] = symbols.bins[split:]
    return SpectrumBlock(out, symbols.bin_spacing_hz)


def upconvert(block: BasebandBlock, carrier_freq_hz: float) -> PassbandBlock:
    """``sqrt(2) * Re{x[m] exp(2j pi fc m / fs)}``; keeps average power."""
    if len(block) == 0:
        raise InvalidInputError("cannot upconvert an empty block")
    fs = block.sample_rate_hz
    if not (0 < carrier_freq_hz < fs / 2):
        raise InvalidInputError(f"carrier {carrier_freq_hz} Hz not representable at fs={fs} Hz")
    m = np.arange(len(block))
    lo = np.exp(2j * np.pi * carrier_freq_hz * m / fs)
    return PassbandBlock(np.sqrt(2.0) * np.real(block.samples * lo), fs, carrier_freq_hz)


def downconvert(block: PassbandBlock, lpf) -> BasebandBlock:
    """Mix to baseband with ``sqrt(2) exp(-2j pi fc m / fs)`` and low-pass.

    The filter is applied zero-phase (centered linear convolution), so the
    first and last ``(taps - 1) / 2`` output samples carry edge transients.
    """
    taps = None if lpf is None else np.asarray(getattr(lpf, "taps", lpf), dtype=float)
    if taps is None or taps.ndim != 1 or taps.size == 0 or taps.size % 2 == 0:
        raise InvalidInputError("downconversion needs an odd-length FIR low-pass filter")
    if not np.any(taps):
        raise InvalidInputError("low-pass filter taps are all zero")
    if len(block) == 0:
        raise InvalidInputError("cannot downconvert an empty block")
    m = np.arange(len(block))
    lo = np.exp(-2j * np.pi * block.carrier_freq_hz * m / block.sample_rate_hz)
    mixed = np.sqrt(2.0) * block.samples * lo
    half = taps.size // 2
    full = np.convolve(mixed, taps)
    return BasebandBlock(full[half:half + len(block)], block.sample_rate_hz)


def add_cyclic_prefix(samples: np.ndarray, length: int) -> np.ndarray:
    if length < 0 or length > samples.size:
        raise InvalidInputError(f"invalid cyclic prefix length {length}")
    if length == 0:
        return samples.copy()
    return np.concatenate([samples[-length:], samples])
