"""Command line entry point: ``ofdm-papr {ccdf,ber,design-filter,reproduce,selftest}``."""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import report
from .config import SimulationConfig, _PARSERS, parse_config_text, parse_value
from .errors import InvalidConfigError, InvalidInputError
from .firdesign import PRESETS
from .montecarlo import estimate_ber, estimate_ccdf, papr_at_ccdf
from .peak import Scheme

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2

# Short flags mapped to config keys.
ALIASES = {
    "blocks": "num_blocks",
    "seed": "master_seed",
    "mod": "modulation",
    "cr": "clipping_ratios",
    "snr": "snr_grid_db",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_common(p):
    p.add_argument("--config", type=Path, help="key = value configuration file")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    group = p.add_argument_group("configuration overrides")
    for key in _PARSERS:
        flags = [f"--{key}"]
        if "_" in key:
            flags.append(f"--{key.replace('_', '-')}")
        group.add_argument(*flags, dest=f"cfg_{key}", metavar="VALUE")
    for short, key in ALIASES.items():
        group.add_argument(f"--{short}", dest=f"alias_{short}", metavar="VALUE",
                           help=f"same as --{key}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ofdm-papr", description=__doc__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    for name, help_text in (("ccdf", "estimate PAPR CCDF curves"),
                            ("ber", "estimate BER curves over AWGN"),
                            ("reproduce", "regenerate all tables and curve data"),
                            ("selftest", "run quick internal consistency checks")):
        _add_common(sub.add_parser(name, help=help_text))
    p = sub.add_parser("design-filter", help="design a preset filter and write taps/response")
    _add_common(p)
    p.add_argument("--preset", required=True, choices=sorted(PRESETS) + ["receiver_lpf"])
    return parser


def config_from_args(args) -> SimulationConfig:
    values = {}
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise InvalidConfigError(f"cannot read config: {exc}") from None
        values.update(parse_config_text(text))
    for key in _PARSERS:
        raw = getattr(args, f"cfg_{key}", None)
        if raw is not None:
            values[key] = parse_value(key, raw)
    for short, key in ALIASES.items():
        raw = getattr(args, f"alias_{short}", None)
        if raw is not None:
            values[key] = parse_value(key, raw)
    return SimulationConfig(**values)


def _crs(config):
    return (None,) if config.scheme in (Scheme.NONE,) else config.clipping_ratios


def cmd_ccdf(config, out):
    for cr in _crs(config):
        curve = estimate_ccdf(config, cr)
        path = report.write_ccdf(out / report.ccdf_filename(config.scheme, config.modulation, cr),
                                 curve, config)
        label = "unclipped" if cr is None else f"CR={cr:.1f}"
        print(f"{config.scheme.value} {config.modulation.value} {label}: "
              f"PAPR@1e-1 = {papr_at_ccdf(curve, report.CCDF_LEVEL):.2f} dB -> {path}")


def cmd_ber(config, out):
    for cr in _crs(config):
        curve = estimate_ber(config, cr)
        path = report.write_ber(out / report.ber_filename(config.scheme, config.modulation, cr),
                                curve, config)
        label = "unclipped" if cr is None else f"CR={cr:.1f}"
        summary = ", ".join(f"{s:g} dB: {b:.3e}" for s, b, _, _ in curve.points)
        print(f"{config.scheme.value} {config.modulation.value} {label}: {summary} -> {path}")


def cmd_design(config, out, preset):
    fir, taps, resp = report.write_filter(out, preset, config)
    print(f"{preset}: {fir.num_taps} taps, ripple {fir.achieved_ripple:.3e} -> {taps}, {resp}")


def cmd_reproduce(config, out):
    res = report.reproduce_tables(config, out)
    for mod, data in res["papr"].items():
        for cr, ex, pr in data["table"]:
            print(f"PAPR {mod.value} CR={cr:.1f}: existing {ex:.2f} dB, proposed {pr:.2f} dB, "
                  f"improvement {ex - pr:.2f} dB")
    for mod, data in res["ber"].items():
        for cr, ex, pr in data["table"]:
            print(f"BER {mod.value} CR={cr:.1f} @ {report.TABLE_SNR_DB:g} dB: existing {ex:.4f}, "
                  f"proposed {pr:.4f}, difference {ex - pr:.4f}")
    print(f"wrote {len(res['files'])} files to {out}")


def cmd_selftest(config):
    from . import dsp, firdesign, modem
    from .peak import clip_passband, papr_db

    rng = np.random.default_rng(config.master_seed)
    checks = []
    x = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    blk = dsp.BasebandBlock(x, 1.0)
    back = dsp.idft_unitary(dsp.dft_unitary(blk)).samples
    checks.append(("dft inverse identity", np.allclose(back, x, rtol=0, atol=1e-12 * np.abs(x).max())))
    fir = firdesign.remez_design(firdesign.lowpass_spec(0.2, 0.3, 21))
    checks.append(("remez tap symmetry", np.array_equal(fir.taps, fir.taps[::-1])))
    for scheme in modem.ModulationScheme:
        bits = modem.generate_bits(4000, config.master_seed)
        rt = modem.demap_symbols(modem.map_symbols(bits, scheme), scheme)
        checks.append((f"{scheme.value} round trip", np.array_equal(rt, bits)))
    pb = dsp.PassbandBlock(rng.standard_normal(256), 8.0, 2.0)
    checks.append(("clip bound", np.max(np.abs(clip_passband(pb, 0.5).samples)) <= 0.5))
    checks.append(("papr constant envelope", abs(papr_db(np.exp(1j * np.arange(8)))) < 1e-12))
    ok = True
    for name, passed in checks:
        print(f"{'PASS' if passed else 'FAIL'} {name}")
        ok &= bool(passed)
    return ok


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = config_from_args(args)
    except (UsageError, InvalidConfigError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = args.out
    t0 = time.perf_counter()
    try:
        if args.command == "ccdf":
            cmd_ccdf(config, out)
        elif args.command == "ber":
            cmd_ber(config, out)
        elif args.command == "design-filter":
            cmd_design(config, out, args.preset)
        elif args.command == "reproduce":
            cmd_reproduce(config, out)
        elif args.command == "selftest":
            if not cmd_selftest(config):
                return EXIT_RUNTIME
    except (InvalidInputError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"done in {time.perf_counter() - t0:.1f} s", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
