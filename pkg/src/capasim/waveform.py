"""Per-path waveform-domain matrices for OFDM, OTFS and AFDM.

Every path contributes ``G = T (Phi Z^f Pi^zeta) T^H`` where ``T`` is the
waveform's unitary transform (DFT, partial DFT for OTFS, chirped DFT for
AFDM), ``Pi`` a cyclic sample delay, ``Z`` a per-sample Doppler phase ramp
and ``Phi`` the chirp-periodic-prefix correction (identity except for AFDM).
"""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import InvalidDimensionError, InvalidInputError, InvalidSpecError
from .linalg import cyclic_shift_matrix, dft_matrix


class WaveformKind(str, Enum):
    OFDM = "ofdm"
    OTFS = "otfs"
    AFDM = "afdm"


@dataclass(frozen=True)
class WaveformSpec:
    kind: WaveformKind
    n: int
    n1: int = 1
    n2: int = 1
    c1: float = 0.0
    c2: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", WaveformKind(self.kind))
        if self.n < 1:
            raise InvalidSpecError(f"subcarrier count must be >= 1, got {self.n}")
        if self.kind is WaveformKind.OTFS:
            if self.n1 < 1 or self.n2 < 1 or self.n1 * self.n2 != self.n:
                raise InvalidSpecError(
                    f"OTFS needs n1*n2 == n, got {self.n1}*{self.n2} != {self.n}"
                )
        # c1 == 0 is accepted: it is the degenerate chirp that collapses AFDM to OFDM
        if self.kind is WaveformKind.AFDM and not self.c1 >= 0:
            raise InvalidSpecError(f"AFDM needs c1 >= 0, got {self.c1}")

    @classmethod
    def ofdm(cls, n: int) -> WaveformSpec:
        return cls(WaveformKind.OFDM, n)

    @classmethod
    def otfs(cls, n: int, n1: int | None = None, n2: int | None = None) -> WaveformSpec:
        if n1 is None and n2 is None:
            n1 = default_otfs_split(n)
        if n1 is None:
            n1 = n // n2
        if n2 is None:
            n2 = n // n1
        return cls(WaveformKind.OTFS, n, n1=n1, n2=n2)

    @classmethod
    def afdm(cls, n: int, c1: float | None = None, c2: float = 0.0,
             max_doppler: float = 1.0) -> WaveformSpec:
        if c1 is None:
            c1 = default_afdm_c1(n, max_doppler)
        return cls(WaveformKind.AFDM, n, c1=c1, c2=c2)


def default_otfs_split(n: int) -> int:
    """Largest divisor of ``n`` not exceeding ``sqrt(n)`` (8 for 64, 12 for 144)."""
    root = math.isqrt(n)
    return next(d for d in range(root, 0, -1) if n % d == 0)


def default_afdm_c1(n: int, max_doppler: float) -> float:
    """Chirp rate ``(2*ceil(f_max) + 1) / (2n)`` for normalized Doppler bound ``f_max``."""
    return (2 * math.ceil(abs(max_doppler)) + 1) / (2 * n)


@dataclass(frozen=True)
class NormalizedPath:
    """A path in sample units: integer delay taps and Doppler in cycles per block."""

    gain: complex
    delay_taps: int
    doppler: float

    def check(self, n: int) -> None:
        if not 0 <= self.delay_taps < n:
            raise InvalidInputError(f"delay {self.delay_taps} outside [0, {n})")


def normalize_path(gain: complex, delay_s: float, doppler_hz: float,
                   sampling_rate: float, n: int) -> NormalizedPath:
    """Convert physical delay/Doppler to taps and cycles per ``n``-sample block."""
    return NormalizedPath(
        gain=gain,
        delay_taps=int(round(delay_s * sampling_rate)),
        doppler=doppler_hz * n / sampling_rate,
    )


def doppler_matrix(n: int, f: float) -> np.ndarray:
    m = np.arange(n)
    return np.diag(np.exp(-2j * np.pi * f * m / n))


def afdm_chirp_matrix(n: int, c: float) -> np.ndarray:
    m = np.arange(n, dtype=float)
    return np.diag(np.exp(-2j * np.pi * c * m**2))


def cpp_matrix(n: int, c1: float, zeta: int) -> np.ndarray:
    """Chirp-periodic-prefix phase correction for a path delayed by ``zeta`` taps."""
    if not 0 <= zeta < n:
        raise InvalidInputError(f"delay {zeta} outside [0, {n})")
    diag = np.ones(n, dtype=complex)
    m = np.arange(zeta, dtype=float)
    diag[:zeta] = np.exp(-2j * np.pi * c1 * (n**2 - 2 * n * (zeta - m)))
    return np.diag(diag)


def afdm_transform(n: int, c1: float, c2: float) -> np.ndarray:
    """The AFDM modulation matrix ``Lambda_c2 F_N Lambda_c1``."""
    return afdm_chirp_matrix(n, c2) @ dft_matrix(n) @ afdm_chirp_matrix(n, c1)


def _path_diagonal(n: int, path: NormalizedPath) -> np.ndarray:
    path.check(n)
    return np.exp(-2j * np.pi * path.doppler * np.arange(n) / n)


def _conjugate_shift(t: np.ndarray, diag: np.ndarray, zeta: int) -> np.ndarray:
    """``t diag(d) Pi^zeta t^H`` using a column gather in place of two products."""
    n = diag.size
    src = (np.arange(n) + zeta) % n
    return (t[:, src] * diag[src]) @ t.conj().T


@lru_cache(maxsize=32)
def _otfs_transform(n1: int, n2: int) -> np.ndarray:
    return _frozen(np.kron(dft_matrix(n1), np.eye(n2)))


@lru_cache(maxsize=32)
def _dft(n: int) -> np.ndarray:
    return _frozen(dft_matrix(n))


@lru_cache(maxsize=32)
def _afdm(n: int, c1: float, c2: float) -> np.ndarray:
    return _frozen(afdm_transform(n, c1, c2))


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def subcarrier_matrix_ofdm(spec: WaveformSpec, path: NormalizedPath) -> np.ndarray:
    if spec.kind is not WaveformKind.OFDM:
        raise InvalidSpecError(f"expected an OFDM spec, got {spec.kind.value}")
    return _conjugate_shift(_dft(spec.n), _path_diagonal(spec.n, path), path.delay_taps)


def subcarrier_matrix_otfs(spec: WaveformSpec, path: NormalizedPath) -> np.ndarray:
    if spec.kind is not WaveformKind.OTFS:
        raise InvalidSpecError(f"expected an OTFS spec, got {spec.kind.value}")
    if spec.n1 * spec.n2 != spec.n:
        raise InvalidSpecError("OTFS factorization mismatch")
    t = _otfs_transform(spec.n1, spec.n2)
    return _conjugate_shift(t, _path_diagonal(spec.n, path), path.delay_taps)


def subcarrier_matrix_afdm(spec: WaveformSpec, path: NormalizedPath) -> np.ndarray:
    if spec.kind is not WaveformKind.AFDM:
        raise InvalidSpecError(f"expected an AFDM spec, got {spec.kind.value}")
    t = _afdm(spec.n, spec.c1, spec.c2)
    diag = _path_diagonal(spec.n, path)
    diag *= np.diagonal(cpp_matrix(spec.n, spec.c1, path.delay_taps))
    return _conjugate_shift(t, diag, path.delay_taps)


_BUILDERS = {
    WaveformKind.OFDM: subcarrier_matrix_ofdm,
    WaveformKind.OTFS: subcarrier_matrix_otfs,
    WaveformKind.AFDM: subcarrier_matrix_afdm,
}


def subcarrier_matrix(spec: WaveformSpec, path: NormalizedPath) -> np.ndarray:
    """Dispatch to the builder for ``spec.kind``."""
    return _BUILDERS[spec.kind](spec, path)


def assemble_effective_channel(per_path_mimo: Sequence[np.ndarray],
                               per_path_g: Sequence[np.ndarray]) -> np.ndarray:
    """Sum of ``kron(H_l, G_l)`` over paths; result is ``NM x NM``."""
    if len(per_path_mimo) != len(per_path_g) or not per_path_mimo:
        raise InvalidInputError(
            f"need equal, non-empty path lists (got {len(per_path_mimo)} and {len(per_path_g)})"
        )
    mimo = [np.atleast_2d(np.asarray(h, dtype=complex)) for h in per_path_mimo]
    gs = [np.asarray(g, dtype=complex) for g in per_path_g]
    m_shape, g_shape = mimo[0].shape, gs[0].shape
    if m_shape[0] != m_shape[1] or g_shape[0] != g_shape[1]:
        raise InvalidDimensionError("per-path matrices must be square")
    if any(h.shape != m_shape for h in mimo) or any(g.shape != g_shape for g in gs):
        raise InvalidDimensionError("per-path matrices have inconsistent shapes")
    out = np.zeros((m_shape[0] * g_shape[0],) * 2, dtype=complex)
    for h, g in zip(mimo, gs):
        out += np.kron(h, g)
    return out
