import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ofdm_papr.config import SimulationConfig
from ofdm_papr.dsp import BasebandBlock, PassbandBlock, SpectrumBlock
from ofdm_papr.errors import InvalidInputError, UndefinedPaprError
from ofdm_papr.firdesign import FrequencyMask
from ofdm_papr.montecarlo import block_symbols
from ofdm_papr.peak import (ClipConfig, Scheme, clip_baseband, clip_passband, composed_filter,
                            filter_masks, image_template, papr_db, rms, run_chain,
                            scheme_filter_spec, stopband_template, synthesize)

FILTERED = [Scheme.EXISTING_BPF, Scheme.PROPOSED_HPF]


def pb(x):
    return PassbandBlock(np.asarray(x, dtype=float), 8e6, 2e6)


def random_pb(n, seed):
    return pb(np.random.default_rng(seed).standard_normal(n))


class TestMeasures:
    def test_rms(self):
        assert rms(pb([3, -4, 0, 0])) == pytest.approx(2.5)

    def test_papr_constant_envelope(self):
        assert papr_db(BasebandBlock(np.exp(1j * np.arange(16)), 1.0)) == pytest.approx(0, abs=1e-12)

    def test_papr_single_spike(self):
        x = np.zeros(100)
        x[3] = 1
        assert papr_db(pb(x)) == pytest.approx(20.0)

    def test_papr_sine(self):
        assert papr_db(pb(np.cos(np.pi / 2 * np.arange(64)))) == pytest.approx(3.0103, abs=1e-4)

    def test_zero_block(self):
        with pytest.raises(UndefinedPaprError):
            papr_db(pb(np.zeros(8)))

    @given(st.floats(1e-6, 1e6), st.integers(0, 1000))
    @settings(max_examples=50)
    def test_scale_invariance(self, c, seed):
        x = random_pb(64, seed)
        assert abs(papr_db(pb(c * x.samples)) - papr_db(x)) < 1e-10


class TestClip:
    def test_passband_examples(self):
        np.testing.assert_array_equal(clip_passband(pb([0.5, -2, 3, -0.2]), 1.0).samples,
                                      [0.5, -1, 1, -0.2])

    def test_baseband_keeps_phase(self):
        y = clip_baseband(BasebandBlock([3 + 4j, 0.1j], 1.0), 1.0).samples
        np.testing.assert_allclose(y, [0.6 + 0.8j, 0.1j])

    def test_nonpositive_level(self):
        with pytest.raises(InvalidInputError):
            clip_passband(pb([1.0]), 0.0)
        with pytest.raises(InvalidInputError):
            ClipConfig(-1.0)

    @given(st.floats(0.01, 5), st.integers(0, 1000))
    @settings(max_examples=50)
    def test_bound_and_idempotence(self, a, seed):
        x = random_pb(128, seed)
        once = clip_passband(x, a)
        assert np.max(np.abs(once.samples)) <= a
        np.testing.assert_array_equal(clip_passband(once, a).samples, once.samples)
        z = BasebandBlock(x.samples + 1j * x.samples[::-1], 8e6)
        zc = clip_baseband(z, a)
        assert np.max(np.abs(zc.samples)) <= a
        np.testing.assert_array_equal(clip_baseband(zc, a).samples, zc.samples)


@pytest.fixture(scope="module")
def cfg():
    return SimulationConfig()


class TestComposedFilter:
    def test_length_mismatch(self):
        m = FrequencyMask(np.ones(8))
        with pytest.raises(InvalidInputError):
            composed_filter(random_pb(16, 0), m, m)

    def test_identity_masks(self):
        x = random_pb(32, 1)
        ones = FrequencyMask(np.ones(32))
        np.testing.assert_allclose(composed_filter(x, ones, ones).samples, x.samples, atol=1e-14)

    @pytest.mark.parametrize("scheme", FILTERED)
    def test_linearity(self, cfg, scheme):
        mask, template = filter_masks(cfg, scheme, cfg.fft_size)
        x, y = random_pb(cfg.fft_size, 2), random_pb(cfg.fft_size, 3)
        a, b = 1.7, -0.4
        lhs = composed_filter(pb(a * x.samples + b * y.samples), mask, template).samples
        rhs = (a * composed_filter(x, mask, template).samples
               + b * composed_filter(y, mask, template).samples)
        assert np.max(np.abs(lhs - rhs)) <= 1e-10 * np.max(np.abs(lhs))

    @pytest.mark.parametrize("scheme", FILTERED)
    def test_stop_bins_exactly_zero(self, cfg, scheme):
        mask, template = filter_masks(cfg, scheme, cfg.fft_size)
        zeros = template.gains == 0
        assert zeros.any()
        out = composed_filter(random_pb(cfg.fft_size, 4), mask, template)
        spec = np.fft.fft(out.samples)
        # Re-transforming a real signal leaves only rounding in zeroed bins.
        assert np.max(np.abs(spec[zeros])) < 1e-10 * np.max(np.abs(spec))
        product = mask.gains * template.gains
        assert np.all(product[zeros] == 0.0)

    def test_template_bins(self, cfg):
        t = stopband_template(scheme_filter_spec(cfg, Scheme.PROPOSED_HPF), 1024).gains
        # fs / 1024 = 7812.5 Hz per bin; the stop band ends at 1.4 MHz -> bin 179.2
        assert np.all(t[:180] == 0) and t[180] == 1
        assert np.all(t[1024 - 179:] == 0) and t[1024 - 180] == 1
        assert np.all(t[180:1024 - 179] == 1)
        b = stopband_template(scheme_filter_spec(cfg, Scheme.EXISTING_BPF), 1024).gains
        # upper stop band begins at 2.6 MHz -> bin 332.8
        assert b[332] == 1 and np.all(b[333:692] == 0)

    def test_image_template_covers_occupied_bins(self, cfg):
        t = image_template(128, 1024, 256).gains
        assert t.sum() == 256
        assert t[256 - 63] == 1 and t[256 + 64] == 1 and t[256 - 64] == 0
        np.testing.assert_array_equal(t[1:], t[1:][::-1])


class TestChain:
    def test_symbol_count_checked(self, cfg):
        with pytest.raises(InvalidInputError):
            run_chain(SpectrumBlock(np.ones(64), 1e6 / 64), cfg, Scheme.NONE)

    def test_none_is_plain_synthesis(self, cfg):
        _, sym = block_symbols(cfg, 0)
        out = run_chain(sym, cfg, Scheme.NONE)
        np.testing.assert_array_equal(out.passband.samples, synthesize(sym, cfg).samples)
        assert math.isinf(out.clip_level_a)
        # unit-energy symbols, unitary transforms: power 1/L
        assert np.mean(out.passband.samples ** 2) == pytest.approx(1 / 8, rel=0.02)

    def test_clip_level_tracks_rms(self, cfg):
        _, sym = block_symbols(cfg, 1)
        base = run_chain(sym, cfg, Scheme.NONE)
        out = run_chain(sym, cfg, Scheme.CLIP_ONLY, 1.2)
        assert out.clip_level_a == pytest.approx(1.2 * rms(base.passband))
        assert np.max(np.abs(out.passband.samples)) <= out.clip_level_a

    @pytest.mark.parametrize("scheme", list(Scheme))
    def test_every_scheme_runs(self, cfg, scheme):
        _, sym = block_symbols(cfg, 2)
        out = run_chain(sym, cfg, scheme, 1.0)
        assert len(out.passband) == cfg.fft_size
        assert 0 <= out.papr_db < 20

    def test_filtering_regrows_peaks(self, cfg):
        _, sym = block_symbols(cfg, 3)
        clip = run_chain(sym, cfg, Scheme.CLIP_ONLY, 0.8).papr_db
        for scheme in FILTERED:
            assert run_chain(sym, cfg, scheme, 0.8).papr_db > clip

    def test_scheme_aliases(self):
        assert Scheme.parse("proposed_hpf") is Scheme.PROPOSED_HPF
        assert Scheme.parse("bpf") is Scheme.EXISTING_BPF
        with pytest.raises(InvalidInputError):
            Scheme.parse("lpf")


class TestSpecExamples:
    def test_rms_examples(self):
        assert rms(pb([1, -1, 1, -1])) == 1.0
        assert rms(BasebandBlock([3, 4j], 1.0)) == pytest.approx(math.sqrt(12.5))
        assert rms(pb(np.zeros(4))) == 0.0

    def test_papr_examples(self):
        assert papr_db(BasebandBlock([1, 1j, -1, -1j], 1.0)) == pytest.approx(0.0, abs=1e-12)
        assert papr_db(pb([2, 0, 0, 0])) == pytest.approx(6.0206, abs=1e-4)
        from ofdm_papr.dsp import idft_unitary
        x = idft_unitary(SpectrumBlock(np.ones(128), 1.0))
        assert papr_db(x) == pytest.approx(10 * np.log10(128), abs=1e-9)

    def test_baseband_clip_keeps_angle(self):
        z = 2 * np.exp(1j * np.pi / 3)
        out = clip_baseband(BasebandBlock([z, 0.5], 1.0), 1.0).samples
        np.testing.assert_allclose(out, [np.exp(1j * np.pi / 3), 0.5], atol=1e-15)

    @given(st.floats(0.05, 1.0), st.integers(0, 1000))
    @settings(max_examples=50)
    def test_clipping_never_raises_papr(self, frac, seed):
        x = random_pb(256, seed)
        a = frac * np.max(np.abs(x.samples))
        assert papr_db(clip_passband(x, a)) <= papr_db(x) + 1e-9

    @pytest.mark.parametrize("scheme", FILTERED)
    def test_unclipped_block_passes_within_ripple(self, cfg, scheme):
        from ofdm_papr.firdesign import remez_design
        _, sym = block_symbols(cfg, 5)
        x = synthesize(sym, cfg)
        mask, template = filter_masks(cfg, scheme, cfg.fft_size)
        y = composed_filter(x, mask, template)
        X, Y = np.fft.fft(x.samples), np.fft.fft(y.samples)
        delta = remez_design(scheme_filter_spec(cfg, scheme)).achieved_ripple
        assert np.max(np.abs(Y - X)) <= delta * np.max(np.abs(X)) * (1 + 1e-9)


@pytest.fixture(scope="module")
def thousand_blocks(cfg):
    from ofdm_papr.montecarlo import collect_paprs
    combos = [(s, cr) for s in (Scheme.CLIP_ONLY,) + tuple(FILTERED) for cr in cfg.clipping_ratios]
    return collect_paprs(cfg.replace(num_blocks=1000), combos)


def test_clip_only_papr_nondecreasing_in_cr(cfg, thousand_blocks):
    from ofdm_papr.montecarlo import ccdf_from_paprs, papr_at_ccdf
    levels = [papr_at_ccdf(ccdf_from_paprs(thousand_blocks[(Scheme.CLIP_ONLY, cr)]), 0.1)
              for cr in cfg.clipping_ratios]
    assert all(b >= a for a, b in zip(levels, levels[1:]))


def test_filtering_regrowth_on_average(cfg, thousand_blocks):
    for cr in cfg.clipping_ratios:
        clip = thousand_blocks[(Scheme.CLIP_ONLY, cr)].mean()
        for scheme in FILTERED:
            assert thousand_blocks[(scheme, cr)].mean() >= clip
