"""Scenario configuration shared by the channel sampler and the harness."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path as FilePath

from .channel import SPEED_OF_LIGHT, ApertureConfig, QuadratureGrid, wavelength
from .detector import ML_MAX_SYMBOLS, GaBPConfig
from .errors import ConfigError, CapaSimError
from .waveform import WaveformKind, WaveformSpec, default_afdm_c1, default_otfs_split

ARRAY_MODES = ("continuous", "discrete")
DETECTORS = ("gabp", "lmmse", "ml")


@dataclass(frozen=True)
class SimConfig:
    """One simulated scenario. Defaults follow the reference system parameters."""

    carrier_hz: float = 2.4e9
    sampling_rate: float = 1e6
    n: int = 64
    m: int = 1
    num_paths: int = 5
    r_max: float = 1500.0
    v_max: float = 122.0
    tx_area: float = 0.25
    rx_area: float = 0.25
    standoff: float = 30.0
    waveform: str = "afdm"
    n1: int | None = None
    n2: int | None = None
    c1: float | None = None
    c2: float = 0.0
    array_mode: str = "continuous"
    detector: str = "gabp"
    iterations: int = 20
    damping: float = 0.5
    symbol_power: float = 1.0
    quad_points: int = 10
    normalize_channel: bool = False
    seed: int = 0
    trials: int = 100
    snr_db: tuple[float, ...] = field(default=(0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0))
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "snr_db", tuple(float(s) for s in self.snr_db))
        self.validate()

    def validate(self) -> None:
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        need(self.carrier_hz > 0 and self.sampling_rate > 0, "frequencies must be positive")
        need(self.n >= 1, "n must be >= 1")
        need(self.m == 1, "only single-stream operation (m = 1) is supported")
        need(self.num_paths >= 1, "num_paths must be >= 1")
        need(self.r_max > 10 * wavelength(self.carrier_hz), "r_max must exceed ten wavelengths")
        need(self.v_max >= 0, "v_max must be non-negative")
        need(self.tx_area > 0 and self.rx_area > 0, "aperture areas must be positive")
        need(self.standoff > 0, "standoff must be positive")
        need(self.waveform in {k.value for k in WaveformKind}, f"unknown waveform {self.waveform!r}")
        need(self.array_mode in ARRAY_MODES, f"unknown array mode {self.array_mode!r}")
        need(self.detector in DETECTORS, f"unknown detector {self.detector!r}")
        need(self.quad_points >= 1, "quad_points must be >= 1")
        need(self.trials >= 0, "trials must be non-negative")
        need(self.workers >= 1, "workers must be >= 1")
        need(all(math.isfinite(s) or s == math.inf for s in self.snr_db), "SNR values must be finite or inf")
        need(self.max_delay_taps < self.n,
             f"largest possible delay ({self.max_delay_taps} taps) must be shorter than n={self.n}")
        if self.detector == "ml":
            need(self.n * self.m <= ML_MAX_SYMBOLS,
                 f"ml detector limited to {ML_MAX_SYMBOLS} symbols per block")
        try:
            self.gabp_config(0.0)
            self.waveform_spec()
        except CapaSimError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def wavelength(self) -> float:
        return wavelength(self.carrier_hz)

    @property
    def max_delay_taps(self) -> int:
        longest = 2 * self.r_max + self.standoff
        return int(round(longest / SPEED_OF_LIGHT * self.sampling_rate))

    @property
    def max_doppler(self) -> float:
        """Largest normalized Doppler, in cycles per ``n``-sample block."""
        return self.v_max * self.carrier_hz / SPEED_OF_LIGHT * self.n / self.sampling_rate

    def waveform_spec(self) -> WaveformSpec:
        kind = WaveformKind(self.waveform)
        if kind is WaveformKind.OTFS:
            n1 = self.n1 if self.n1 is not None else (
                self.n // self.n2 if self.n2 else default_otfs_split(self.n))
            n2 = self.n2 if self.n2 is not None else self.n // n1
            return WaveformSpec(kind, self.n, n1=n1, n2=n2)
        if kind is WaveformKind.AFDM:
            c1 = self.c1 if self.c1 is not None else default_afdm_c1(self.n, self.max_doppler)
            return WaveformSpec(kind, self.n, c1=c1, c2=self.c2)
        return WaveformSpec(kind, self.n)

    def gabp_config(self, noise_var: float) -> GaBPConfig:
        return GaBPConfig(self.iterations, self.damping, self.symbol_power, noise_var)

    def tx_aperture(self) -> ApertureConfig:
        return ApertureConfig.square(self.tx_area)

    def rx_aperture(self) -> ApertureConfig:
        return ApertureConfig.square(self.rx_area, center=(0.0, self.standoff, 0.0))

    def quadrature(self) -> QuadratureGrid:
        return QuadratureGrid.uniform(self.quad_points)

    def with_(self, **changes) -> SimConfig:
        return replace(self, **changes)


_FIELD_TYPES = {f.name: f.type for f in fields(SimConfig)}


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def parse_value(name: str, text: str):
    """Convert the text form of a config field to its typed value."""
    if name not in _FIELD_TYPES:
        raise ConfigError(f"unknown config key {name!r}")
    kind = _FIELD_TYPES[name]
    text = text.strip()
    try:
        if name == "snr_db":
            return tuple(float(s) for s in text.replace(",", " ").split())
        if kind == "bool":
            return _parse_bool(text)
        if kind.endswith("| None"):
            if text.lower() in ("", "none", "auto"):
                return None
            kind = kind.split("|")[0].strip()
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        return text
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {text!r}") from exc


def read_config_file(path: str | FilePath) -> dict:
    """Read a flat ``key = value`` file; ``#`` starts a comment."""
    try:
        text = FilePath(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = parse_value(key, value)
    return values
