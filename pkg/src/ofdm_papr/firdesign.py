"""Equiripple linear-phase FIR design (Parks-McClellan / Remez exchange).

Only odd-length, even-symmetric (Type I) filters are produced. A Type I
filter of ``M`` taps has the zero-phase amplitude response

    A(f) = sum_{k=0}^{r-1} a_k cos(2 pi k f),   r = (M + 1) / 2

so the design problem is a weighted Chebyshev approximation by a
cosine polynomial on the union of the specified bands. The exchange
iterates on ``r + 1`` extremal frequencies; the trial polynomial is
evaluated in barycentric Lagrange form in the variable ``x = cos(2 pi f)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConvergenceError, InvalidConfigError, InvalidInputError, InvalidSpecError

GRID_DENSITY = 32


@dataclass(frozen=True)
class FilterSpec:
    """Multi-band piecewise-constant amplitude specification.

    Band edges are normalized frequencies in cycles/sample, i.e. fractions
    of the sample rate, and must lie in ``[0, 0.5]``.
    """

    bands: tuple[tuple[float, float], ...]
    desired: tuple[float, ...]
    weights: tuple[float, ...]
    num_taps: int

    def __post_init__(self):
        bands = tuple((float(lo), float(hi)) for lo, hi in self.bands)
        object.__setattr__(self, "bands", bands)
        object.__setattr__(self, "desired", tuple(float(d) for d in self.desired))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if not bands:
            raise InvalidSpecError("at least one band is required")
        if len(self.desired) != len(bands) or len(self.weights) != len(bands):
            raise InvalidSpecError("desired and weights need one entry per band")
        edges = [e for band in bands for e in band]
        if edges[0] < 0.0 or edges[-1] > 0.5:
            raise InvalidSpecError(f"band edges must lie in [0, 0.5], got {edges}")
        if any(b <= a for a, b in zip(edges, edges[1:])):
            raise InvalidSpecError(f"band edges must be strictly increasing, got {edges}")
        if any(not math.isfinite(w) or w <= 0 for w in self.weights):
            raise InvalidSpecError("weights must be positive")
        if any(not math.isfinite(d) for d in self.desired):
            raise InvalidSpecError("desired amplitudes must be finite")
        if self.num_taps < 3 or self.num_taps % 2 == 0:
            raise InvalidSpecError(f"num_taps must be odd and >= 3, got {self.num_taps}")


@dataclass(frozen=True)
class FirFilter:
    taps: np.ndarray
    achieved_ripple: float
    iterations: int = 0

    def __post_init__(self):
        taps = np.array(self.taps, dtype=float)
        if taps.ndim != 1 or taps.size == 0:
            raise InvalidInputError("taps must be a nonempty vector")
        if not np.all(np.isfinite(taps)):
            raise InvalidInputError("taps must be finite")
        if not math.isfinite(self.achieved_ripple) or self.achieved_ripple < 0:
            raise InvalidInputError("achieved_ripple must be finite and >= 0")
        taps.flags.writeable = False
        object.__setattr__(self, "taps", taps)

    @property
    def num_taps(self) -> int:
        return self.taps.size


@dataclass(frozen=True)
class FrequencyMask:
    """Real, nonnegative per-bin gains for an FFT of ``len(gains)`` points."""

    gains: np.ndarray = field(repr=False)

    def __post_init__(self):
        gains = np.array(self.gains, dtype=float)
        if gains.ndim != 1 or gains.size == 0:
            raise InvalidInputError("mask must be a nonempty vector")
        if not np.all(np.isfinite(gains)) or np.any(gains < 0):
            raise InvalidInputError("mask gains must be finite and nonnegative")
        gains.flags.writeable = False
        object.__setattr__(self, "gains", gains)

    def __len__(self):
        return self.gains.size


def design_grid(spec: FilterSpec, density: int = GRID_DENSITY):
    """Dense frequency grid over the bands with desired values and weights.

    Grid spacing is ``0.5 / (density * num_taps)``; band edges are always
    grid points.
    """
    step = 0.5 / (density * spec.num_taps)
    freqs, desired, weights, band_of = [], [], [], []
    for i, ((lo, hi), d, w) in enumerate(zip(spec.bands, spec.desired, spec.weights)):
        n = max(2, int(math.ceil((hi - lo) / step)) + 1)
        f = np.linspace(lo, hi, n)
        freqs.append(f)
        desired.append(np.full(n, d))
        weights.append(np.full(n, w))
        band_of.append(np.full(n, i))
    return (np.concatenate(freqs), np.concatenate(desired),
            np.concatenate(weights), np.concatenate(band_of))


def _bary_weights(x):
    # Factor 2 keeps the products O(1) for nodes spread over [-1, 1].
    diff = 2.0 * (x[:, None] - x[None, :])
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


def _bary_eval(xn, yn, wn, x):
    diff = x[:, None] - xn[None, :]
    exact = diff == 0.0
    diff[exact] = 1.0
    t = wn / diff
    out = (t @ yn) / t.sum(axis=1)
    rows, cols = np.nonzero(exact)
    out[rows] = yn[cols]
    return out


def _find_extrema(err, band_of, delta, need):
    """Indices of alternating local extrema of the weighted error."""
    n = err.size
    cand = []
    for j in range(n):
        first = j == 0 or band_of[j - 1] != band_of[j]
        last = j == n - 1 or band_of[j + 1] != band_of[j]
        e = err[j]
        if first and last:
            cand.append(j)
            continue
        left = None if first else err[j - 1]
        right = None if last else err[j + 1]
        if e >= 0:
            if (left is None or e >= left) and (right is None or e > right):
                cand.append(j)
        else:
            if (left is None or e <= left) and (right is None or e < right):
                cand.append(j)
    cand = np.array(cand, dtype=int)
    big = cand[np.abs(err[cand]) >= abs(delta) * (1 - 1e-9)]
    merged = _alternate(big, err) if big.size else []
    if len(merged) < need:
        merged = _alternate(cand, err)
    return merged


def _alternate(cand, err):
    # Collapse runs of equal sign to the largest member.
    merged = [cand[0]]
    for j in cand[1:]:
        if np.sign(err[j]) == np.sign(err[merged[-1]]):
            if abs(err[j]) > abs(err[merged[-1]]):
                merged[-1] = j
        else:
            merged.append(j)
    return merged


def _trim(ext, err, count):
    ext = list(ext)
    while len(ext) > count:
        if len(ext) - count == 1:
            if abs(err[ext[0]]) < abs(err[ext[-1]]):
                ext.pop(0)
            else:
                ext.pop()
            continue
        mags = np.abs(err[ext])
        i = int(np.argmin(mags))
        if i == 0 or i == len(ext) - 1:
            ext.pop(i)
            continue
        # Removing an adjacent pair keeps the signs alternating.
        j = i - 1 if mags[i - 1] < mags[i + 1] else i + 1
        for k in sorted((i, j), reverse=True):
            ext.pop(k)
    return ext


def _taps_from_nodes(xn, yn, wn, num_taps):
    # A(f) has degree (M - 1) / 2 in cos, so M uniform samples determine it.
    c = (num_taps - 1) // 2
    omega = 2 * np.pi * np.arange(num_taps) / num_taps
    amp = _bary_eval(xn, yn, wn, np.cos(omega))
    h = np.real(np.fft.ifft(amp * np.exp(-1j * omega * c)))
    return 0.5 * (h + h[::-1])


def remez_design(spec: FilterSpec, max_iterations: int = 100, tolerance: float = 1e-9,
                 grid_density: int = GRID_DENSITY) -> FirFilter:
    """Design the minimax-optimal Type I filter for ``spec``.

    Iteration stops once the weighted error magnitudes at the extremal set
    agree to ``tolerance`` (relative). Raises ``ConvergenceError`` carrying
    the last iterate if that never happens within ``max_iterations``.
    """
    if max_iterations < 1:
        raise InvalidInputError("max_iterations must be >= 1")
    r = (spec.num_taps + 1) // 2
    freqs, des, wts, band_of = design_grid(spec, grid_density)
    if freqs.size < r + 1:
        raise InvalidSpecError("frequency grid too coarse for the tap count")
    if r + 1 < 2 * len(spec.bands) - 1:
        raise InvalidSpecError(
            f"{spec.num_taps} taps cannot resolve {len(spec.bands)} bands")
    x = np.cos(2 * np.pi * freqs)
    sign = (-1.0) ** np.arange(r + 1)

    ext = np.unique(np.round(np.linspace(0, freqs.size - 1, r + 1)).astype(int))
    last = None
    for it in range(1, max_iterations + 1):
        xe = x[ext]
        b = _bary_weights(xe)
        delta = np.dot(b, des[ext]) / np.dot(b, sign / wts[ext])
        ye = des[ext] - sign * delta / wts[ext]
        xn, yn = xe[:-1], ye[:-1]
        wn = _bary_weights(xn)
        amp = _bary_eval(xn, yn, wn, x)
        err = wts * (des - amp)

        peak = np.max(np.abs(err))
        last = FirFilter(_taps_from_nodes(xn, yn, wn, spec.num_taps), float(peak), it)
        mags = np.abs(err[ext])
        if peak <= 1e-14 or (mags.max() - mags.min()) <= tolerance * mags.max():
            if peak <= abs(delta) * (1 + 1e3 * tolerance) + 1e-14:
                return last

        new = _find_extrema(err, band_of, delta, r + 1)
        if len(new) < r + 1:
            raise ConvergenceError(
                f"lost alternation: {len(new)} extrema for {r + 1} required", last)
        new = np.array(_trim(new, err, r + 1))
        if np.array_equal(new, ext):
            return last
        ext = new
    raise ConvergenceError(f"no convergence after {max_iterations} iterations", last)


def frequency_response(fir: FirFilter, freqs) -> np.ndarray:
    """Zero-phase amplitude of a symmetric filter at normalized ``freqs``."""
    f = np.atleast_1d(np.asarray(freqs, dtype=float))
    if np.any(f < 0) or np.any(f > 0.5) or not np.all(np.isfinite(f)):
        raise InvalidInputError("frequencies must lie in [0, 0.5]")
    taps = fir.taps
    c = (taps.size - 1) // 2
    k = np.arange(1, c + 1)
    return taps[c] + 2.0 * np.cos(2 * np.pi * np.outer(f, k)) @ taps[c + 1:]


def mask_from_filter(fir: FirFilter, fft_size: int, sample_rate_hz: float) -> FrequencyMask:
    """Sample ``|A(f)|`` at the bin frequencies of an ``fft_size``-point FFT.

    Bin ``k`` is taken at ``min(k, fft_size - k) * fs / fft_size`` so the
    mask is symmetric and real, as a real filter requires.
    """
    if fft_size < 2:
        raise InvalidInputError("fft_size must be >= 2")
    if sample_rate_hz <= 0:
        raise InvalidInputError("sample_rate_hz must be positive")
    k = np.arange(fft_size)
    bin_hz = np.minimum(k, fft_size - k) * sample_rate_hz / fft_size
    return FrequencyMask(np.abs(frequency_response(fir, bin_hz / sample_rate_hz)))


DEFAULT_PRESET_TAPS = 105
DEFAULT_TRANSITION_HZ = 100e3


def _preset_params(config, overrides):
    bw = float(config.bandwidth_hz)
    fc = float(config.carrier_freq_hz)
    fs = float(config.sample_rate_hz)
    if not (bw > 0 and fc > 0 and fs > 0):
        raise InvalidConfigError("bandwidth, carrier and sample rate must be positive")
    if fc + bw / 2 >= fs / 2:
        raise InvalidConfigError(
            f"occupied band reaches Nyquist: fc + BW/2 = {fc + bw / 2} >= fs/2 = {fs / 2}")
    opts = dict(getattr(config, "filter_spec_overrides", None) or {})
    opts.update(overrides)
    trans = float(opts.get("transition_hz", DEFAULT_TRANSITION_HZ))
    taps = int(opts.get("num_taps", DEFAULT_PRESET_TAPS))
    stop_w = float(opts.get("stop_weight", 1.0))
    pass_w = float(opts.get("pass_weight", 1.0))
    lo = fc - bw / 2
    hi = fc + bw / 2
    if lo - trans <= 0:
        raise InvalidConfigError("lower stop band would be empty")
    return fs, lo, hi, trans, taps, stop_w, pass_w


def preset_existing_bpf(config, **overrides) -> FilterSpec:
    """Band-pass around the occupied passband ``[fc - BW/2, fc + BW/2]``."""
    fs, lo, hi, trans, taps, stop_w, pass_w = _preset_params(config, overrides)
    if hi + trans >= fs / 2:
        raise InvalidConfigError("upper stop band would be empty")
    bands = ((0.0, (lo - trans) / fs), (lo / fs, hi / fs), ((hi + trans) / fs, 0.5))
    return FilterSpec(bands, (0.0, 1.0, 0.0), (stop_w, pass_w, stop_w), taps)


def preset_proposed_hpf(config, **overrides) -> FilterSpec:
    """High-pass keeping everything from ``fc - BW/2`` up to Nyquist."""
    fs, lo, hi, trans, taps, stop_w, pass_w = _preset_params(config, overrides)
    bands = ((0.0, (lo - trans) / fs), (lo / fs, 0.5))
    return FilterSpec(bands, (0.0, 1.0), (stop_w, pass_w), taps)


PRESETS = {
    "existing_bpf": preset_existing_bpf,
    "proposed_hpf": preset_proposed_hpf,
}


def lowpass_spec(passband: float, stopband: float, num_taps: int,
                 weights: Sequence[float] = (1.0, 1.0)) -> FilterSpec:
    return FilterSpec(((0.0, passband), (stopband, 0.5)), (1.0, 0.0), tuple(weights), num_taps)
