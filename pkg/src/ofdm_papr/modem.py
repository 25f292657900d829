"""Bit source, Gray-coded QPSK / 16-QAM mapping and hard-decision demapping.

Random bits come from numpy's PCG64 generator seeded with the 64-bit seed
as given, so a ``(count, seed)`` pair reproduces the same bits everywhere.
"""
from __future__ import annotations

import enum

import numpy as np

from .errors import InvalidInputError


class ModulationScheme(enum.Enum):
    QPSK = "qpsk"
    QAM16 = "qam16"

    @property
    def bits_per_symbol(self) -> int:
        return 2 if self is ModulationScheme.QPSK else 4

    @classmethod
    def parse(cls, text) -> "ModulationScheme":
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower().replace("-", "").replace("_", "")
        aliases = {"qpsk": cls.QPSK, "qam": cls.QAM16, "qam16": cls.QAM16, "16qam": cls.QAM16}
        try:
            return aliases[key]
        except KeyError:
            raise InvalidInputError(f"unknown modulation {text!r}") from None


_QAM16_SCALE = 1.0 / np.sqrt(10.0)
_QPSK_SCALE = 1.0 / np.sqrt(2.0)


def generate_bits(count: int, seed: int) -> np.ndarray:
    if count < 0:
        raise InvalidInputError("bit count must be >= 0")
    rng = np.random.Generator(np.random.PCG64(int(seed) & 0xFFFF_FFFF_FFFF_FFFF))
    return rng.integers(0, 2, size=int(count), dtype=np.uint8)


def _pam4(b_sign, b_mag):
    # Gray order along the axis: 11 -> -3, 10 -> -1, 00 -> +1, 01 -> +3
    return (1.0 - 2.0 * b_sign) * (1.0 + 2.0 * b_mag)


def map_symbols(bits, scheme: ModulationScheme) -> np.ndarray:
    """Map bits to unit-average-energy symbols.

    QPSK: ``(b0, b1) -> ((1 - 2 b0) + 1j (1 - 2 b1)) / sqrt(2)``.
    16-QAM: ``(b0, b1)`` drive the in-phase 4-PAM axis and ``(b2, b3)`` the
    quadrature axis, levels ``{-3, -1, 1, 3} / sqrt(10)``.
    """
    bits = np.asarray(bits, dtype=np.uint8).reshape(-1)
    k = scheme.bits_per_symbol
    if bits.size % k:
        raise InvalidInputError(f"{bits.size} bits do not divide into {k}-bit symbols")
    b = bits.reshape(-1, k).astype(float)
    if scheme is ModulationScheme.QPSK:
        return _QPSK_SCALE * ((1 - 2 * b[:, 0]) + 1j * (1 - 2 * b[:, 1]))
    return _QAM16_SCALE * (_pam4(b[:, 0], b[:, 1]) + 1j * _pam4(b[:, 2], b[:, 3]))


def demap_symbols(symbols, scheme: ModulationScheme) -> np.ndarray:
    """Minimum-distance hard decisions (per-axis slicing for square Gray maps)."""
    s = np.asarray(symbols, dtype=np.complex128).reshape(-1)
    if s.size == 0:
        raise InvalidInputError("no symbols to demap")
    re, im = s.real, s.imag
    if scheme is ModulationScheme.QPSK:
        out = np.stack([re < 0, im < 0], axis=1)
    else:
        thr = 2.0 * _QAM16_SCALE
        out = np.stack([re < 0, np.abs(re) > thr, im < 0, np.abs(im) > thr], axis=1)
    return out.astype(np.uint8).reshape(-1)


def constellation(scheme: ModulationScheme):
    """All constellation points with their bit labels, label order."""
    k = scheme.bits_per_symbol
    labels = ((np.arange(2 ** k)[:, None] >> np.arange(k - 1, -1, -1)) & 1).astype(np.uint8)
    return map_symbols(labels.reshape(-1), scheme), labels


def count_bit_errors(sent, received) -> tuple[int, float]:
    a = np.asarray(sent).reshape(-1)
    b = np.asarray(received).reshape(-1)
    if a.size != b.size:
        raise InvalidInputError(f"length mismatch: {a.size} vs {b.size}")
    if a.size == 0:
        return 0, 0.0
    errors = int(np.count_nonzero(a != b))
    return errors, errors / a.size
