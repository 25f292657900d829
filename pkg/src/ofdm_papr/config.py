"""Simulation configuration and its plain-text ``key = value`` file format."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidConfigError, InvalidInputError
from .modem import ModulationScheme
from .peak import Scheme


@dataclass(frozen=True)
class SimulationConfig:
    bandwidth_hz: float = 1e6
    oversampling_l: int = 8
    sample_rate_hz: float | None = None
    carrier_freq_hz: float = 2e6
    num_subcarriers_n: int = 128
    cp_len: int = 32
    modulation: ModulationScheme = ModulationScheme.QPSK
    clipping_ratios: tuple[float, ...] = (0.8, 1.0, 1.2, 1.4, 1.6)
    scheme: Scheme = Scheme.NONE
    num_blocks: int = 10_000
    snr_grid_db: tuple[float, ...] = (0.0, 2.0, 4.0, 6.0, 8.0, 10.0)
    master_seed: int = 0
    filter_spec_overrides: dict | None = field(default=None, compare=False, hash=False)
    # Monte Carlo controls
    workers: int = 1
    min_bits: int = 100_000
    min_errors: int = 100
    max_bits: int = 1_000_000
    ccdf_step_db: float = 0.1
    symmetric_padding: bool = False

    def __post_init__(self):
        object.__setattr__(self, "modulation", ModulationScheme.parse(self.modulation))
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        object.__setattr__(self, "clipping_ratios", tuple(float(c) for c in self.clipping_ratios))
        object.__setattr__(self, "snr_grid_db", tuple(float(s) for s in self.snr_grid_db))
        if self.bandwidth_hz <= 0 or self.carrier_freq_hz <= 0:
            raise InvalidConfigError("bandwidth and carrier must be positive")
        if int(self.oversampling_l) != self.oversampling_l or self.oversampling_l < 1:
            raise InvalidConfigError("oversampling_l must be an integer >= 1")
        fs = self.bandwidth_hz * self.oversampling_l
        if self.sample_rate_hz is None:
            object.__setattr__(self, "sample_rate_hz", fs)
        elif not math.isclose(self.sample_rate_hz, fs, rel_tol=1e-12):
            raise InvalidConfigError(
                f"sample_rate_hz must equal bandwidth_hz * oversampling_l = {fs}")
        if self.num_subcarriers_n < 2 or self.num_subcarriers_n % 2:
            raise InvalidConfigError("num_subcarriers_n must be even and >= 2")
        if not 0 <= self.cp_len <= self.num_subcarriers_n:
            raise InvalidConfigError("cp_len must lie in [0, N]")
        if self.carrier_freq_hz + self.bandwidth_hz / 2 >= self.sample_rate_hz / 2:
            raise InvalidConfigError("carrier + BW/2 must stay below Nyquist")
        if any(not (math.isfinite(c) and c > 0) for c in self.clipping_ratios):
            raise InvalidConfigError("clipping ratios must be positive")
        if self.num_blocks < 1 or self.workers < 1:
            raise InvalidConfigError("num_blocks and workers must be >= 1")

    @property
    def fft_size(self) -> int:
        return self.num_subcarriers_n * self.oversampling_l

    def replace(self, **changes) -> "SimulationConfig":
        if "bandwidth_hz" in changes or "oversampling_l" in changes:
            changes.setdefault("sample_rate_hz", None)
        return dataclasses.replace(self, **changes)

    def describe(self) -> list[str]:
        """``key = value`` lines that round-trip through ``parse_config_text``.

        ``workers`` is left out: it cannot change results, and leaving it
        out keeps output files byte-identical across worker counts.
        """
        out = []
        for f in dataclasses.fields(self):
            if f.name == "workers":
                continue
            out.append(f"{f.name} = {format_value(getattr(self, f.name))}")
        return out


def format_value(value) -> str:
    if isinstance(value, (ModulationScheme, Scheme)):
        return value.value
    if isinstance(value, tuple):
        return ", ".join(format_value(v) for v in value)
    if isinstance(value, dict):
        return ", ".join(f"{k}:{v}" for k, v in sorted(value.items()))
    if value is None:
        return "none"
    return repr(value) if isinstance(value, float) else str(value)


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_float_list(text: str) -> tuple[float, ...]:
    parts = [p for p in text.replace(";", ",").replace(" ", ",").split(",") if p]
    return tuple(float(p) for p in parts)


def _parse_overrides(text: str) -> dict | None:
    if text.strip().lower() in ("", "none"):
        return None
    out = {}
    for item in text.split(","):
        if not item.strip():
            continue
        key, sep, val = item.partition(":")
        if not sep:
            raise ValueError(f"override {item!r} is not key:value")
        out[key.strip()] = float(val)
    return out


def _parse_optional_float(text: str) -> float | None:
    return None if text.strip().lower() in ("", "none", "auto") else float(text)


_PARSERS = {
    "bandwidth_hz": float,
    "oversampling_l": int,
    "sample_rate_hz": _parse_optional_float,
    "carrier_freq_hz": float,
    "num_subcarriers_n": int,
    "cp_len": int,
    "modulation": ModulationScheme.parse,
    "clipping_ratios": _parse_float_list,
    "scheme": Scheme.parse,
    "num_blocks": int,
    "snr_grid_db": _parse_float_list,
    "master_seed": lambda s: int(s, 0),
    "filter_spec_overrides": _parse_overrides,
    "workers": int,
    "min_bits": lambda s: int(float(s)),
    "min_errors": int,
    "max_bits": lambda s: int(float(s)),
    "ccdf_step_db": float,
    "symmetric_padding": _parse_bool,
}


def parse_value(key: str, text: str):
    try:
        parser = _PARSERS[key]
    except KeyError:
        raise InvalidConfigError(f"unknown config key {key!r}") from None
    try:
        return parser(text.strip())
    except (ValueError, InvalidInputError) as exc:
        raise InvalidConfigError(f"bad value for {key}: {text!r} ({exc})") from None


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise InvalidConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        values[key.strip()] = parse_value(key.strip(), val)
    return values


def load_config(path, **overrides) -> SimulationConfig:
    values = parse_config_text(Path(path).read_text())
    values.update(overrides)
    return SimulationConfig(**values)
