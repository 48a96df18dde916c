"""Multicarrier continuous-aperture link simulation and message-passing detection."""

from .channel import ApertureConfig, Path, QuadratureGrid
from .config import SimConfig
from .detector import GaBPConfig, gabp_detect, lmmse_detect, ml_oracle
from .errors import (
    CapaSimError,
    ConfigError,
    DimensionTooLargeError,
    InvalidDimensionError,
    InvalidGeometryError,
    InvalidInputError,
    InvalidSpecError,
    NumericFailureError,
)
from .harness import BERRecord, emit_csv, run_trial, sweep
from .waveform import NormalizedPath, WaveformKind, WaveformSpec

__version__ = "0.1.0"
