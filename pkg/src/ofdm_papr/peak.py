"""PAPR measurement, clipping, and the FFT-domain composed filter.

The transmit chain is

    symbols -> zero-pad interpolate -> unitary IDFT -> upconvert
            -> clip at A = CR * rms -> FFT -> mask * template -> IFFT

where the mask is sampled from an equiripple design (band-pass for the
existing scheme, high-pass for the proposed one) and the template forces
the filter's stop-band bins back to exactly zero.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from . import dsp
from .dsp import BasebandBlock, PassbandBlock, SpectrumBlock
from .errors import InvalidInputError, UndefinedPaprError
from .firdesign import (FilterSpec, FrequencyMask, mask_from_filter, preset_existing_bpf,
                        preset_proposed_hpf, remez_design)


class Scheme(enum.Enum):
    NONE = "none"
    CLIP_ONLY = "clip_only"
    EXISTING_BPF = "clip_filter_existing_bpf"
    PROPOSED_HPF = "clip_filter_proposed_hpf"

    @classmethod
    def parse(cls, text) -> "Scheme":
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower()
        aliases = {
            "none": cls.NONE, "unclipped": cls.NONE,
            "clip_only": cls.CLIP_ONLY, "clip": cls.CLIP_ONLY,
            "clip_filter_existing_bpf": cls.EXISTING_BPF, "existing_bpf": cls.EXISTING_BPF,
            "existing": cls.EXISTING_BPF, "bpf": cls.EXISTING_BPF,
            "clip_filter_proposed_hpf": cls.PROPOSED_HPF, "proposed_hpf": cls.PROPOSED_HPF,
            "proposed": cls.PROPOSED_HPF, "hpf": cls.PROPOSED_HPF,
        }
        try:
            return aliases[key]
        except KeyError:
            raise InvalidInputError(f"unknown scheme {text!r}") from None

    @property
    def short(self) -> str:
        return {"clip_filter_existing_bpf": "existing_bpf",
                "clip_filter_proposed_hpf": "proposed_hpf"}.get(self.value, self.value)


@dataclass(frozen=True)
class ClipConfig:
    clipping_ratio: float
    domain: str = "passband"

    def __post_init__(self):
        if not (math.isfinite(self.clipping_ratio) and self.clipping_ratio > 0):
            raise InvalidInputError(f"clipping ratio must be positive, got {self.clipping_ratio}")
        if self.domain not in ("baseband", "passband"):
            raise InvalidInputError(f"unknown clip domain {self.domain!r}")

    def level(self, sigma: float) -> float:
        return self.clipping_ratio * sigma


@dataclass(frozen=True)
class ChainOutput:
    passband: PassbandBlock
    papr_db: float
    clip_level_a: float


def _samples(block):
    if isinstance(block, (BasebandBlock, PassbandBlock)):
        return block.samples
    if isinstance(block, SpectrumBlock):
        return block.bins
    return np.asarray(block)


def rms(block) -> float:
    x = _samples(block)
    if x.size == 0:
        raise InvalidInputError("rms of an empty block")
    return float(np.sqrt(np.mean(np.abs(x) ** 2)))


def papr_db(block) -> float:
    """``10 log10(max |x|^2 / mean |x|^2)`` over the block."""
    x = _samples(block)
    if x.size == 0:
        raise InvalidInputError("papr of an empty block")
    p = np.abs(x) ** 2
    mean = p.mean()
    if mean == 0.0:
        raise UndefinedPaprError("papr of an all-zero block is undefined")
    return float(10.0 * np.log10(p.max() / mean))


def clip_baseband(block: BasebandBlock, a: float) -> BasebandBlock:
    """Limit the envelope to ``a`` while keeping each sample's phase."""
    if not a > 0:
        raise InvalidInputError(f"clip level must be positive, got {a}")
    x = block.samples
    mag = np.abs(x)
    over = mag > a
    y = x.copy()
    y[over] = x[over] * (a / mag[over])
    # Rounding can leave |y| one ulp above a; shrink until the bound is exact.
    high = np.abs(y) > a
    while high.any():
        y[high] *= 1.0 - 2.0 ** -52
        high = np.abs(y) > a
    return BasebandBlock(y, block.sample_rate_hz)


def clip_passband(block: PassbandBlock, a: float) -> PassbandBlock:
    if not a > 0:
        raise InvalidInputError(f"clip level must be positive, got {a}")
    return block.replace(np.clip(block.samples, -a, a))


def composed_filter(block: PassbandBlock, mask: FrequencyMask,
                    inband_zero_template: FrequencyMask) -> PassbandBlock:
    """FFT, per-bin ``mask * template``, IFFT; returns the real part."""
    n = len(block)
    if len(mask) != n or len(inband_zero_template) != n:
        raise InvalidInputError(
            f"mask/template lengths {len(mask)}/{len(inband_zero_template)} != block length {n}")
    spec = np.fft.fft(block.samples) * (mask.gains * inband_zero_template.gains)
    y = np.fft.ifft(spec)
    residue = np.max(np.abs(y.imag)) if n else 0.0
    scale = max(1.0, float(np.max(np.abs(block.samples))))
    assert residue <= 1e-10 * scale, f"imaginary residue {residue} after real filtering"
    return block.replace(y.real)


def scheme_filter_spec(config, scheme: Scheme) -> FilterSpec:
    if scheme is Scheme.EXISTING_BPF:
        return preset_existing_bpf(config)
    if scheme is Scheme.PROPOSED_HPF:
        return preset_proposed_hpf(config)
    raise InvalidInputError(f"scheme {scheme.value} has no filter")


@functools.lru_cache(maxsize=32)
def _design(spec: FilterSpec):
    return remez_design(spec)


def stopband_template(spec: FilterSpec, fft_size: int) -> FrequencyMask:
    """Zero at bins inside the spec's zero-amplitude bands, one elsewhere."""
    k = np.arange(fft_size)
    f = np.minimum(k, fft_size - k) / fft_size
    gains = np.ones(fft_size)
    for (lo, hi), d in zip(spec.bands, spec.desired):
        if d == 0.0:
            gains[(f >= lo - 1e-12) & (f <= hi + 1e-12)] = 0.0
    return FrequencyMask(gains)


def image_template(num_subcarriers: int, fft_size: int, carrier_bin: int,
                   symmetric: bool = False) -> FrequencyMask:
    """One at bins occupied by the upconverted symbol image, zero elsewhere."""
    n = num_subcarriers
    split = n // 2 if symmetric else n // 2 + 1
    base = np.concatenate([np.arange(split), np.arange(fft_size - (n - split), fft_size)])
    gains = np.zeros(fft_size)
    gains[(base + carrier_bin) % fft_size] = 1.0
    gains[(-(base + carrier_bin)) % fft_size] = 1.0
    return FrequencyMask(gains)


@functools.lru_cache(maxsize=32)
def _filter_pair(spec: FilterSpec, fft_size: int, sample_rate_hz: float):
    mask = mask_from_filter(_design(spec), fft_size, sample_rate_hz)
    return mask, stopband_template(spec, fft_size)


def filter_masks(config, scheme: Scheme, fft_size: int):
    """Mask and template for a filtering scheme, cached per design."""
    return _filter_pair(scheme_filter_spec(config, scheme), fft_size, float(config.sample_rate_hz))


def synthesize(symbols: SpectrumBlock, config) -> PassbandBlock:
    """Oversampled OFDM block, upconverted to the configured carrier."""
    padded = dsp.zero_pad_interpolate(symbols, config.oversampling_l,
                                      symmetric=getattr(config, "symmetric_padding", False))
    x = dsp.idft_unitary(padded)
    x = BasebandBlock(x.samples, float(config.sample_rate_hz))
    return dsp.upconvert(x, config.carrier_freq_hz)


def run_chain(symbols: SpectrumBlock, config, scheme: Scheme,
              clipping_ratio: float | None = None) -> ChainOutput:
    """Run one symbol block through the transmit chain for ``scheme``.

    PAPR is measured on the final passband block, after any filtering, so
    peak regrowth is included.
    """
    if len(symbols) != config.num_subcarriers_n:
        raise InvalidInputError(
            f"expected {config.num_subcarriers_n} symbols, got {len(symbols)}")
    scheme = Scheme.parse(scheme)
    xp = synthesize(symbols, config)
    if scheme is Scheme.NONE:
        return ChainOutput(xp, papr_db(xp), math.inf)

    cr = config.clipping_ratios[0] if clipping_ratio is None else clipping_ratio
    a = ClipConfig(cr).level(rms(xp))
    out = clip_passband(xp, a)
    if scheme is not Scheme.CLIP_ONLY:
        mask, template = filter_masks(config, scheme, len(out))
        out = composed_filter(out, mask, template)
    return ChainOutput(out, papr_db(out), a)
