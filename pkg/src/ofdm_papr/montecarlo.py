"""Monte Carlo CCDF and BER estimation.

Every block draws its bits from a seed derived as a hash of
``(master_seed, stream, block_index)`` (numpy ``SeedSequence``), so results do
not depend on how blocks are spread across worker processes.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import dsp
from .channel import AwgnConfig, add_awgn
from .dsp import PassbandBlock, SpectrumBlock
from .errors import InvalidConfigError, InvalidInputError, OutOfRangeError
from .firdesign import lowpass_spec, remez_design
from .modem import count_bit_errors, demap_symbols, generate_bits, map_symbols
from .peak import Scheme, run_chain

STREAM_BITS = 0
STREAM_NOISE = 1
BER_BATCH = 64
RX_LPF_TAPS = 161


def derive_seed(master_seed: int, *keys: int) -> int:
    ss = np.random.SeedSequence(int(master_seed) & 0xFFFF_FFFF_FFFF_FFFF, spawn_key=keys)
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class CcdfCurve:
    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(t), float(p)) for t, p in self.points)
        if not pts:
            raise InvalidInputError("empty CCDF curve")
        probs = [p for _, p in pts]
        if any(p < 0 or p > 1 for p in probs):
            raise InvalidInputError("probabilities must lie in [0, 1]")
        if any(b > a for a, b in zip(probs, probs[1:])):
            raise InvalidInputError("CCDF probabilities must be nonincreasing")
        object.__setattr__(self, "points", pts)

    @property
    def thresholds(self) -> np.ndarray:
        return np.array([t for t, _ in self.points])

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for _, p in self.points])


@dataclass(frozen=True)
class BerCurve:
    points: tuple[tuple[float, float, int, int], ...]

    def __post_init__(self):
        pts = []
        for snr, ber, bits, errors in self.points:
            if bits < 0 or errors < 0 or errors > bits:
                raise InvalidInputError("inconsistent bit/error counts")
            expected = errors / bits if bits else 0.0
            if not math.isclose(ber, expected, rel_tol=1e-12, abs_tol=0.0):
                raise InvalidInputError("ber must equal errors / bits")
            pts.append((float(snr), float(ber), int(bits), int(errors)))
        object.__setattr__(self, "points", tuple(pts))

    def ber_at(self, snr_db: float) -> float:
        for snr, ber, _, _ in self.points:
            if math.isclose(snr, snr_db, abs_tol=1e-9):
                return ber
        raise OutOfRangeError(f"no BER point at {snr_db} dB")


def ccdf_from_paprs(paprs, step_db: float = 0.1) -> CcdfCurve:
    """Empirical ``P(PAPR > t)`` on a ``step_db`` grid spanning the samples."""
    v = np.asarray(paprs, dtype=float)
    if v.size == 0:
        raise InvalidInputError("no PAPR samples")
    lo = math.floor(v.min() / step_db) - 1
    hi = math.ceil(v.max() / step_db) + 1
    grid = np.round(np.arange(lo, hi + 1) * step_db, 10)
    s = np.sort(v)
    probs = 1.0 - np.searchsorted(s, grid, side="right") / s.size
    return CcdfCurve(tuple(zip(grid.tolist(), probs.tolist())))


def papr_at_ccdf(curve: CcdfCurve, level: float) -> float:
    """Threshold where the CCDF crosses ``level``.

    Interpolates linearly in ``(threshold, log10 probability)``; a segment
    ending at probability zero is interpolated linearly in probability.
    """
    t = curve.thresholds
    p = curve.probabilities
    positive = p[p > 0]
    if not (0 < level <= 1) or positive.size == 0 or level > p.max() or level < positive.min():
        raise OutOfRangeError(f"level {level} outside the curve's range")
    hit = np.nonzero(p == level)[0]
    if hit.size:
        return float(t[hit[0]])
    i = int(np.nonzero(p < level)[0][0])
    t0, t1, p0, p1 = t[i - 1], t[i], p[i - 1], p[i]
    if p1 == 0:
        frac = (p0 - level) / (p0 - p1)
    else:
        frac = (math.log10(p0) - math.log10(level)) / (math.log10(p0) - math.log10(p1))
    return float(t0 + frac * (t1 - t0))


def block_symbols(config, block_index: int):
    """Bits and mapped subcarrier symbols for one block."""
    bps = config.modulation.bits_per_symbol
    bits = generate_bits(config.num_subcarriers_n * bps,
                         derive_seed(config.master_seed, STREAM_BITS, block_index))
    spacing = config.bandwidth_hz / config.num_subcarriers_n
    return bits, SpectrumBlock(map_symbols(bits, config.modulation), spacing)


def _papr_worker(args):
    config, combos, indices = args
    out = np.empty((len(combos), len(indices)))
    for j, b in enumerate(indices):
        _, symbols = block_symbols(config, b)
        for i, (scheme, cr) in enumerate(combos):
            out[i, j] = run_chain(symbols, config, scheme, cr).papr_db
    return out


def _chunks(n, parts):
    edges = np.linspace(0, n, parts + 1).round().astype(int)
    return [range(a, b) for a, b in zip(edges, edges[1:]) if b > a]


def _map(func, tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, tasks))


def collect_paprs(config, combos) -> dict:
    """PAPR of every block for each ``(scheme, clipping_ratio)`` pair.

    All pairs see the same symbol blocks.
    """
    combos = [(Scheme.parse(s), float(cr)) for s, cr in combos]
    tasks = [(config, combos, list(r)) for r in _chunks(config.num_blocks, config.workers)]
    parts = _map(_papr_worker, tasks, config.workers)
    table = np.concatenate(parts, axis=1)
    return {combo: table[i] for i, combo in enumerate(combos)}


def estimate_ccdf(config, clipping_ratio: float | None = None) -> CcdfCurve:
    if config.num_blocks < 100:
        raise InvalidConfigError("CCDF estimation needs num_blocks >= 100")
    cr = config.clipping_ratios[0] if clipping_ratio is None else clipping_ratio
    paprs = collect_paprs(config, [(config.scheme, cr)])[(config.scheme, float(cr))]
    return ccdf_from_paprs(paprs, config.ccdf_step_db)


def receiver_lpf(config):
    """Low-pass for downconversion: flat to BW/2, stop from 0.65 BW."""
    fs = config.sample_rate_hz
    spec = lowpass_spec(0.5 * config.bandwidth_hz / fs, 0.65 * config.bandwidth_hz / fs,
                        RX_LPF_TAPS)
    return _cached_design(spec)


_DESIGNS = {}


def _cached_design(spec):
    if spec not in _DESIGNS:
        _DESIGNS[spec] = remez_design(spec)
    return _DESIGNS[spec]


def transmit(config, block_index: int, clipping_ratio: float):
    """Bits, symbols and the CP-extended passband samples of one block."""
    bits, symbols = block_symbols(config, block_index)
    out = run_chain(symbols, config, config.scheme, clipping_ratio)
    tx = dsp.add_cyclic_prefix(np.asarray(out.passband.samples), config.cp_len * config.oversampling_l)
    return bits, symbols.bins, PassbandBlock(tx, config.sample_rate_hz, config.carrier_freq_hz)


def receive(received: PassbandBlock, config, lpf, reference=None) -> np.ndarray:
    """Recover the N subcarrier symbols from a CP-extended passband block.

    The FFT window opens midway into the cyclic prefix so that neither end
    of the zero-phase low-pass reaches past the block; the resulting cyclic
    shift is undone per subcarrier. With ``reference`` symbols given, a
    real scalar gain is removed (ideal gain control).
    """
    L = config.oversampling_l
    n = config.num_subcarriers_n
    cp = config.cp_len * L
    half = lpf.num_taps // 2
    start = (cp // 2) // L * L
    if start < half or start + n * L + half > cp + n * L:
        raise InvalidConfigError(
            f"cyclic prefix of {cp} samples is too short for a {lpf.num_taps}-tap receiver filter")
    base = dsp.downconvert(received, lpf).samples
    dec = base[start:start + n * L:L]
    shift = (cp - start) // L
    k = np.arange(n)
    y = np.fft.fft(dec, norm="ortho") * math.sqrt(L) * np.exp(2j * np.pi * k * shift / n)
    if reference is not None:
        ref = np.asarray(reference)
        gain = np.real(np.vdot(ref, y)) / np.real(np.vdot(ref, ref))
        if gain > 0:
            y = y / gain
    return y


def _ber_worker(args):
    config, cr, snr_points, indices, lpf = args
    errors = np.zeros((len(snr_points), len(indices)), dtype=np.int64)
    for j, b in enumerate(indices):
        bits, symbols, tx = transmit(config, b, cr)
        seed = derive_seed(config.master_seed, STREAM_NOISE, b)
        for i, snr in enumerate(snr_points):
            rx = add_awgn(tx, AwgnConfig(snr, seed, noise_fraction(config)))
            y = receive(rx, config, lpf, reference=symbols)
            errors[i, j] = count_bit_errors(bits, demap_symbols(y, config.modulation))[0]
    return errors


def noise_fraction(config) -> float:
    """Share of ``[0, fs/2]`` the occupied band covers; SNR grid points are
    signal power over the noise power inside that band."""
    return config.bandwidth_hz / (config.sample_rate_hz / 2)


def estimate_ber(config, clipping_ratio: float | None = None) -> BerCurve:
    """BER per SNR point, counting until both ``min_bits`` and ``min_errors``
    are reached or ``max_bits`` is exhausted.

    Blocks are processed in fixed batches of ``BER_BATCH`` in index order,
    so the stopping point is independent of the worker count.
    """
    if not config.snr_grid_db:
        raise InvalidConfigError("snr_grid_db is empty")
    cr = config.clipping_ratios[0] if clipping_ratio is None else clipping_ratio
    lpf = receiver_lpf(config)
    bits_per_block = config.num_subcarriers_n * config.modulation.bits_per_symbol
    snrs = list(config.snr_grid_db)
    bits = [0] * len(snrs)
    errs = [0] * len(snrs)
    active = list(range(len(snrs)))
    next_block = 0
    pool = ProcessPoolExecutor(max_workers=config.workers) if config.workers > 1 else None
    try:
        while active:
            batch = range(next_block, next_block + BER_BATCH)
            next_block += BER_BATCH
            points = [snrs[i] for i in active]
            tasks = [(config, cr, points, list(r), lpf) for r in _chunks(len(batch), config.workers)]
            tasks = [(c, x, p, [batch[i] for i in r], f) for c, x, p, r, f in tasks]
            parts = pool.map(_ber_worker, tasks) if pool else map(_ber_worker, tasks)
            counts = np.concatenate(list(parts), axis=1).sum(axis=1)
            still = []
            for i, e in zip(active, counts):
                bits[i] += bits_per_block * len(batch)
                errs[i] += int(e)
                enough = bits[i] >= config.min_bits and errs[i] >= config.min_errors
                if not (enough or bits[i] >= config.max_bits):
                    still.append(i)
            active = still
    finally:
        if pool:
            pool.shutdown()
    return BerCurve(tuple((s, e / b, b, e) for s, b, e in zip(snrs, bits, errs)))
