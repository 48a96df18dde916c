"""Symbol detectors for ``y = H c + w`` with QPSK symbols.

The message-passing detector keeps one soft replica and one error variance
per edge ``(n, m)`` of the dense factor graph (receive sample ``n``, symbol
``m``) and updates all edges in parallel each iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionTooLargeError, InvalidDimensionError, InvalidInputError
from .linalg import hermitian_solve

VARIANCE_FLOOR = 1e-30
# extrinsic precisions below this fraction of the column total carry no information
_NO_INFO_RTOL = 1e-13
ML_MAX_SYMBOLS = 12


@dataclass(frozen=True)
class GaBPConfig:
    iterations: int = 20
    damping: float = 0.5
    symbol_power: float = 1.0
    noise_var: float = 0.0

    def __post_init__(self):
        if self.iterations < 1:
            raise InvalidInputError("iterations must be >= 1")
        if not 0 < self.damping < 1:
            raise InvalidInputError(f"damping must lie in (0, 1), got {self.damping}")
        if not self.symbol_power > 0:
            raise InvalidInputError("symbol power must be positive")
        if self.noise_var < 0:
            raise InvalidInputError("noise variance must be non-negative")


@dataclass
class GaBPState:
    """Soft replicas and their error variances on the N x M edge grid."""

    replicas: np.ndarray
    variances: np.ndarray

    @classmethod
    def initial(cls, shape: tuple[int, int], symbol_power: float) -> GaBPState:
        return cls(np.zeros(shape, dtype=complex), np.full(shape, float(symbol_power)))


def qpsk_amplitude(symbol_power: float) -> float:
    return math.sqrt(symbol_power / 2)


def _check_system(y, h) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(y, dtype=complex).ravel()
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != y.shape[0]:
        raise InvalidDimensionError(f"channel {h.shape} does not match {y.shape[0]} observations")
    return y, h


def sic_update(y, h, state: GaBPState, noise_var: float) -> tuple[np.ndarray, np.ndarray]:
    """Soft interference cancellation on every edge.

    Returns the cancelled signals and their interference-plus-noise
    variances, both shaped like ``h``.
    """
    y, h = _check_system(y, h)
    return _sic(y, h, np.abs(h) ** 2, state, noise_var)


def _sic(y, h, h_abs2, state, noise_var):
    contrib = h * state.replicas
    y_sic = contrib - contrib.sum(axis=1, keepdims=True)
    y_sic += y[:, None]
    power = h_abs2 * state.variances
    var_sic = power.sum(axis=1, keepdims=True) - power
    # the row-total-minus-self trick can round slightly below zero
    np.maximum(var_sic, 0.0, out=var_sic)
    var_sic += noise_var
    np.maximum(var_sic, VARIANCE_FLOOR, out=var_sic)
    return y_sic, var_sic


def _extrinsic_sums(y_sic, var_sic, h_conj, h_abs2):
    """Column sums of precision and precision-weighted matched filter, minus self."""
    inv = 1.0 / var_sic
    precision = h_abs2 * inv
    weighted = h_conj * y_sic
    weighted *= inv
    col_precision = precision.sum(axis=0)
    ext_precision = col_precision - precision
    ext_weighted = weighted.sum(axis=0) - weighted
    no_info = ext_precision <= _NO_INFO_RTOL * col_precision
    return ext_precision, ext_weighted, no_info


def belief_update(y_sic, var_sic, h, symbol_power: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Extrinsic beliefs: combine every row except the edge's own.

    Edges whose other rows carry no information fall back to the prior
    (mean 0, variance ``symbol_power``).
    """
    h = np.asarray(h, dtype=complex)
    ext_precision, ext_weighted, no_info = _extrinsic_sums(
        y_sic, var_sic, h.conj(), np.abs(h) ** 2)
    safe = np.where(no_info, 1.0, ext_precision)
    belief_var = np.where(no_info, symbol_power, 1.0 / safe)
    belief = np.where(no_info, 0.0, ext_weighted / safe)
    return belief, belief_var


def qpsk_denoise(belief, belief_var, symbol_power: float):
    """Posterior mean of a QPSK symbol under a Gaussian belief."""
    q = qpsk_amplitude(symbol_power)
    belief = np.asarray(belief)
    scale = 2 * q / np.asarray(belief_var)
    return q * (np.tanh(scale * belief.real) + 1j * np.tanh(scale * belief.imag))


def damp(new, old, damping: float):
    return damping * new + (1 - damping) * old


def mse_update(replica, symbol_power: float):
    return np.clip(symbol_power - np.abs(replica) ** 2, 0.0, symbol_power)


def consensus(y_sic, var_sic, h, symbol_power: float = 1.0) -> np.ndarray:
    """Final per-symbol estimate combining all rows (no exclusion).

    A symbol whose column is entirely zero gets the prior mean 0.
    """
    h = np.asarray(h, dtype=complex)
    precision = (np.abs(h) ** 2 / var_sic).sum(axis=0)
    weighted = (h.conj() * y_sic / var_sic).sum(axis=0)
    informative = precision > 0
    return np.where(informative, weighted / np.where(informative, precision, 1.0), 0.0)


def _sweep(y, h, h_conj, h_abs2, state: GaBPState, cfg: GaBPConfig):
    y_sic, var_sic = _sic(y, h, h_abs2, state, cfg.noise_var)
    ext_precision, ext_weighted, no_info = _extrinsic_sums(y_sic, var_sic, h_conj, h_abs2)
    q = qpsk_amplitude(cfg.symbol_power)
    # tanh(2q * mean / var) == tanh(2q * precision-weighted sum), so no division is needed
    replicas = ext_weighted
    replicas *= 2 * q
    if no_info.any():
        replicas[no_info] = 0.0
    as_real = replicas.view(float)
    np.tanh(as_real, out=as_real)
    replicas *= q
    variances = np.abs(replicas)
    variances *= variances
    np.subtract(cfg.symbol_power, variances, out=variances)
    np.clip(variances, 0.0, cfg.symbol_power, out=variances)
    beta = cfg.damping
    replicas *= beta
    replicas += (1 - beta) * state.replicas
    variances *= beta
    variances += (1 - beta) * state.variances
    return GaBPState(replicas, variances), y_sic, var_sic


def gabp_iteration(y, h, state: GaBPState, cfg: GaBPConfig):
    """One parallel sweep over all edges.

    Returns ``(new_state, y_sic, var_sic)``; the cancellation quantities
    are the ones computed from the incoming ``state``.
    """
    y, h = _check_system(y, h)
    return _sweep(y, h, h.conj(), np.abs(h) ** 2, state, cfg)


def gabp_detect(y, h, cfg: GaBPConfig, trace: list | None = None) -> np.ndarray:
    """Soft symbol estimates after ``cfg.iterations`` sweeps and a consensus readout.

    If ``trace`` is a list, ``(state, y_sic, var_sic)`` is appended for
    every iteration.
    """
    y, h = _check_system(y, h)
    h_conj, h_abs2 = h.conj(), np.abs(h) ** 2
    state = GaBPState.initial(h.shape, cfg.symbol_power)
    for _ in range(cfg.iterations):
        state, y_sic, var_sic = _sweep(y, h, h_conj, h_abs2, state, cfg)
        if trace is not None:
            trace.append((state, y_sic, var_sic))
    return consensus(y_sic, var_sic, h, cfg.symbol_power)


def lmmse_detect(y, h, noise_var: float, symbol_power: float = 1.0) -> np.ndarray:
    """``E h^H (E h h^H + s2 I)^-1 y``."""
    y, h = _check_system(y, h)
    gram = symbol_power * (h @ h.conj().T) + noise_var * np.eye(h.shape[0])
    # symmetrize away rounding so the Cholesky path accepts it
    gram = 0.5 * (gram + gram.conj().T)
    return symbol_power * (h.conj().T @ hermitian_solve(gram, y))


def qpsk_alphabet(symbol_power: float = 1.0) -> np.ndarray:
    q = qpsk_amplitude(symbol_power)
    return q * np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j])


def ml_oracle(y, h, symbol_power: float = 1.0, chunk: int = 1 << 16) -> np.ndarray:
    """Exhaustive minimum-distance search over all QPSK vectors."""
    y, h = _check_system(y, h)
    n_sym = h.shape[1]
    if n_sym > ML_MAX_SYMBOLS:
        raise DimensionTooLargeError(
            f"exhaustive search over 4^{n_sym} candidates refused (limit {ML_MAX_SYMBOLS})"
        )
    alphabet = qpsk_alphabet(symbol_power)
    powers = 4 ** np.arange(n_sym - 1, -1, -1)
    best, best_cost = None, np.inf
    for start in range(0, 4**n_sym, chunk):
        index = np.arange(start, min(start + chunk, 4**n_sym))
        c = alphabet[(index[:, None] // powers) % 4]
        cost = np.sum(np.abs(y[None, :] - c @ h.T) ** 2, axis=1)
        i = int(np.argmin(cost))
        if cost[i] < best_cost:
            best, best_cost = c[i], cost[i]
    return best


def qpsk_map(bits, symbol_power: float = 1.0) -> np.ndarray:
    """Gray map bit pairs ``(b0, b1)`` to ``q((1-2 b0) + j(1-2 b1))``."""
    bits = np.asarray(bits, dtype=int).ravel()
    if bits.size % 2:
        raise InvalidInputError("QPSK mapping needs an even number of bits")
    pairs = bits.reshape(-1, 2)
    return qpsk_amplitude(symbol_power) * ((1 - 2 * pairs[:, 0]) + 1j * (1 - 2 * pairs[:, 1]))


def qpsk_demap(symbols) -> np.ndarray:
    symbols = np.asarray(symbols, dtype=complex).ravel()
    return np.stack([symbols.real < 0, symbols.imag < 0], axis=1).astype(int).ravel()
