"""CSV emission and reproduction of the PAPR and BER comparison tables."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .channel import inband_to_fullband_snr_db, snr_to_ebn0_db
from .firdesign import PRESETS, frequency_response, remez_design
from .modem import ModulationScheme
from .montecarlo import (BerCurve, CcdfCurve, ccdf_from_paprs, collect_paprs, estimate_ber,
                         papr_at_ccdf, receiver_lpf)
from .peak import Scheme

CCDF_LEVEL = 0.1
TABLE_SNR_DB = 6.0
FILTER_SCHEMES = (Scheme.EXISTING_BPF, Scheme.PROPOSED_HPF)


def write_csv(path, header, rows, config=None, notes=()):
    """Write a CSV preceded by a ``#`` block recording the configuration."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        for line in notes:
            fh.write(f"# {line}\n")
        if config is not None:
            for line in config.describe():
                fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def _cr_tag(cr) -> str:
    return f"cr{cr:.1f}"


def ccdf_filename(scheme: Scheme, modulation: ModulationScheme, cr=None) -> str:
    if scheme is Scheme.NONE:
        return f"ccdf_none_{modulation.value}.csv"
    return f"ccdf_{scheme.short}_{modulation.value}_{_cr_tag(cr)}.csv"


def ber_filename(scheme: Scheme, modulation: ModulationScheme, cr=None) -> str:
    if scheme is Scheme.NONE:
        return f"ber_none_{modulation.value}.csv"
    return f"ber_{scheme.short}_{modulation.value}_{_cr_tag(cr)}.csv"


def write_ccdf(path, curve: CcdfCurve, config, notes=()):
    rows = [(f"{t:.1f}", f"{p:.6f}") for t, p in curve.points]
    return write_csv(path, ("threshold_db", "probability"), rows, config, notes)


def ebn0_for(config, snr_db):
    """Eb/N0 (dB) for an SNR referred to the occupied band."""
    full = inband_to_fullband_snr_db(snr_db, config.bandwidth_hz, config.sample_rate_hz)
    return snr_to_ebn0_db(full, config.modulation.bits_per_symbol, config.num_subcarriers_n,
                          config.cp_len, config.bandwidth_hz, config.sample_rate_hz)


def write_ber(path, curve: BerCurve, config, notes=()):
    rows = [(f"{snr:.2f}", f"{float(ebn0_for(config, snr)):.4f}", f"{ber:.6e}", bits, errors)
            for snr, ber, bits, errors in curve.points]
    return write_csv(path, ("snr_db", "ebn0_db", "ber", "bits", "errors"), rows, config, notes)


def write_filter(out_dir, preset: str, config, num_points: int = 1024):
    """Taps and a ``num_points`` amplitude-response grid for a preset design."""
    if preset == "receiver_lpf":
        fir = receiver_lpf(config)
    else:
        fir = remez_design(PRESETS[preset](config))
    out_dir = Path(out_dir)
    notes = [f"preset = {preset}", f"num_taps = {fir.num_taps}",
             f"achieved_ripple = {fir.achieved_ripple:.6e}"]
    taps = write_csv(out_dir / f"filter_{preset}_taps.csv", ("coefficient",),
                     [(f"{c:.17g}",) for c in fir.taps], config, notes)
    freqs = np.linspace(0.0, 0.5, num_points)
    amp = frequency_response(fir, freqs)
    rows = [(f"{f * config.sample_rate_hz:.1f}", f"{a:.10f}") for f, a in zip(freqs, amp)]
    resp = write_csv(out_dir / f"filter_{preset}_response.csv", ("freq_hz", "amplitude"),
                     rows, config, notes)
    return fir, taps, resp


def papr_tables(config, log=print):
    """CCDF curves for every scheme and CR, plus the PAPR table per modulation.

    Returns ``{modulation: {"curves": {...}, "table": [(cr, existing, proposed)]}}``.
    """
    results = {}
    for mod in ModulationScheme:
        cfg = config.replace(modulation=mod)
        combos = [(Scheme.NONE, 0.0)]
        combos += [(s, cr) for s in (Scheme.CLIP_ONLY,) + FILTER_SCHEMES for cr in cfg.clipping_ratios]
        paprs = collect_paprs(cfg, combos)
        curves = {k: ccdf_from_paprs(v, cfg.ccdf_step_db) for k, v in paprs.items()}
        table = []
        for cr in cfg.clipping_ratios:
            ex = papr_at_ccdf(curves[(Scheme.EXISTING_BPF, cr)], CCDF_LEVEL)
            pr = papr_at_ccdf(curves[(Scheme.PROPOSED_HPF, cr)], CCDF_LEVEL)
            table.append((cr, ex, pr))
        base = papr_at_ccdf(curves[(Scheme.NONE, 0.0)], CCDF_LEVEL)
        log(f"[{mod.value}] unclipped PAPR at CCDF {CCDF_LEVEL:g}: {base:.2f} dB")
        results[mod] = {"curves": curves, "table": table, "unclipped": base}
    return results


def ber_tables(config, snr_db: float = TABLE_SNR_DB, schemes=None, log=print):
    """BER curves per scheme and CR; table rows ``(cr, existing, proposed)``."""
    grid = tuple(sorted(set(config.snr_grid_db) | {snr_db}))
    schemes = schemes or ((Scheme.NONE, Scheme.CLIP_ONLY) + FILTER_SCHEMES)
    results = {}
    for mod in ModulationScheme:
        curves = {}
        for scheme in schemes:
            crs = (0.0,) if scheme is Scheme.NONE else config.clipping_ratios
            for cr in crs:
                cfg = config.replace(modulation=mod, scheme=scheme, snr_grid_db=grid)
                curves[(scheme, cr)] = (cfg, estimate_ber(cfg, cr if cr else None))
        table = []
        if all(s in schemes for s in FILTER_SCHEMES):
            for cr in config.clipping_ratios:
                ex = curves[(Scheme.EXISTING_BPF, cr)][1].ber_at(snr_db)
                pr = curves[(Scheme.PROPOSED_HPF, cr)][1].ber_at(snr_db)
                table.append((cr, ex, pr))
        log(f"[{mod.value}] BER curves done ({len(curves)})")
        results[mod] = {"curves": curves, "table": table}
    return results


def reproduce_tables(config, out_dir, log=print):
    """Run both schemes for both modulations and every CR; write all CSVs."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    papr = papr_tables(config, log)
    for mod, res in papr.items():
        cfg = config.replace(modulation=mod)
        for (scheme, cr), curve in res["curves"].items():
            written.append(write_ccdf(out_dir / ccdf_filename(scheme, mod, cr), curve,
                                      cfg.replace(scheme=scheme)))
    for name, mod in (("table2.csv", ModulationScheme.QPSK), ("table3.csv", ModulationScheme.QAM16)):
        rows = [(f"{cr:.1f}", f"{ex:.4f}", f"{pr:.4f}", f"{ex - pr:.4f}")
                for cr, ex, pr in papr[mod]["table"]]
        notes = [f"PAPR (dB) at CCDF = {CCDF_LEVEL:g}, modulation = {mod.value}",
                 f"unclipped = {papr[mod]['unclipped']:.4f} dB"]
        written.append(write_csv(out_dir / name, ("cr", "existing_db", "proposed_db", "difference"),
                                 rows, config.replace(modulation=mod), notes))

    ber = ber_tables(config, log=log)
    for mod, res in ber.items():
        for (scheme, cr), (cfg, curve) in res["curves"].items():
            written.append(write_ber(out_dir / ber_filename(scheme, mod, cr), curve, cfg))
    for name, mod in (("table4.csv", ModulationScheme.QPSK), ("table5.csv", ModulationScheme.QAM16)):
        rows = [(f"{cr:.1f}", f"{ex:.6f}", f"{pr:.6f}", f"{ex - pr:.6f}")
                for cr, ex, pr in ber[mod]["table"]]
        notes = [f"BER at SNR = {TABLE_SNR_DB:g} dB (signal over in-band noise), "
                 f"modulation = {mod.value}"]
        written.append(write_csv(out_dir / name, ("cr", "existing_ber", "proposed_ber", "difference"),
                                 rows, config.replace(modulation=mod), notes))
    for preset in PRESETS:
        written.extend(write_filter(out_dir, preset, config)[1:])
    return {"papr": papr, "ber": ber, "files": written}


def read_csv(path):
    """Header and data rows of a CSV written by ``write_csv``."""
    lines = [ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]

