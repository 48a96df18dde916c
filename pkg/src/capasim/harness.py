"""Monte-Carlo BER experiments: one trial, SNR sweeps, CSV output."""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path as FilePath
from typing import IO, Iterable, NamedTuple, Sequence

import numpy as np

from . import channel
from .config import SimConfig
from .detector import gabp_detect, lmmse_detect, ml_oracle, qpsk_demap, qpsk_map
from .errors import ConfigError
from .waveform import assemble_effective_channel, normalize_path, subcarrier_matrix

log = logging.getLogger(__name__)

CSV_COLUMNS = ("snr_db", "waveform", "array_mode", "detector", "n", "bit_errors",
               "bits_total", "ber", "seed", "rx_gain_db")


def snr_to_noise_variance(snr_db: float, symbol_power: float) -> float:
    """Per-entry noise variance ``E_C * 10^(-snr/10)``; ``inf`` dB gives 0."""
    if not symbol_power > 0:
        raise ConfigError("symbol power must be positive")
    if snr_db == math.inf:
        return 0.0
    return symbol_power * 10.0 ** (-snr_db / 10.0)


class TrialOutcome(NamedTuple):
    bit_errors: int
    bits_total: int
    rx_gain_db: float


@dataclass(frozen=True)
class ChannelRealization:
    paths: list
    per_path_mimo: list
    per_path_g: list
    matrix: np.ndarray
    reference_gain: float

    @property
    def row_energy(self) -> float:
        """Mean over rows of the row's squared norm."""
        return float(np.mean(np.sum(np.abs(self.matrix) ** 2, axis=1)))


def per_path_couplings(cfg: SimConfig, paths: Sequence[channel.Path]) -> list[np.ndarray]:
    """1x1 coupling matrices for every path, beams matched to the strongest path."""
    lam = cfg.wavelength
    tx_ap, rx_ap = cfg.tx_aperture(), cfg.rx_aperture()
    target = channel.strongest_path(list(paths))
    j_tx = channel.matched_current(tx_ap, target, "tx", lam)
    j_rx = channel.matched_current(rx_ap, target, "rx", lam)
    if cfg.array_mode == "continuous":
        grid = cfg.quadrature()
        return [channel.effective_path_matrix_capa(j_tx, j_rx, p, grid, tx_ap, rx_ap)
                for p in paths]
    tx_arr = channel.DiscreteArray.filling(tx_ap, lam)
    rx_arr = channel.DiscreteArray.filling(rx_ap, lam)
    w_tx = channel.matched_weights(tx_arr, j_tx)
    w_rx = channel.matched_weights(rx_arr, j_rx)
    return [channel.effective_path_matrix_discrete(tx_arr, rx_arr, p, w_tx, w_rx, lam)
            for p in paths]


def build_channel(cfg: SimConfig, rng: np.random.Generator) -> ChannelRealization:
    """Sample paths and assemble the full effective channel (unnormalized)."""
    paths = channel.sample_paths(cfg, rng)
    mimo = per_path_couplings(cfg, paths)
    spec = cfg.waveform_spec()
    gs = [subcarrier_matrix(spec, normalize_path(1.0, p.delay, p.doppler, cfg.sampling_rate, cfg.n))
          for p in paths]
    reference = sum(p.gain**2 for p in paths) * cfg.tx_area * cfg.rx_area
    return ChannelRealization(paths, mimo, gs, assemble_effective_channel(mimo, gs), reference)


def trial_seed(master: int, point: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([master, point, trial])


def _detect(cfg: SimConfig, y: np.ndarray, h: np.ndarray, noise_var: float) -> np.ndarray:
    if cfg.detector == "gabp":
        return gabp_detect(y, h, cfg.gabp_config(noise_var))
    if cfg.detector == "lmmse":
        return lmmse_detect(y, h, noise_var, cfg.symbol_power)
    return ml_oracle(y, h, cfg.symbol_power)


def run_trial(cfg: SimConfig, seed, snr_db: float | None = None) -> TrialOutcome:
    """Simulate one block transmission and count bit errors.

    ``seed`` is anything ``numpy.random.SeedSequence`` accepts. Paths,
    symbols and noise come from separate child streams, so configurations
    that differ only in waveform, array mode or detector see the same
    geometry and data. ``snr_db`` defaults to the first grid point.
    """
    if snr_db is None:
        if not cfg.snr_db:
            raise ConfigError("no SNR given and the SNR grid is empty")
        snr_db = cfg.snr_db[0]
    seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    path_rng, symbol_rng, noise_rng = (np.random.default_rng(s) for s in seq.spawn(3))

    realization = build_channel(cfg, path_rng)
    h = realization.matrix
    raw_energy = realization.row_energy
    noise_var = snr_to_noise_variance(snr_db, cfg.symbol_power)
    if cfg.normalize_channel:
        h = h / math.sqrt(raw_energy)
    else:
        noise_var *= realization.reference_gain

    n_sym = cfg.n * cfg.m
    bits = symbol_rng.integers(0, 2, size=2 * n_sym)
    c = qpsk_map(bits, cfg.symbol_power)
    noise = math.sqrt(noise_var / 2) * (noise_rng.standard_normal(n_sym)
                                        + 1j * noise_rng.standard_normal(n_sym))
    y = h @ c + noise
    estimate = _detect(cfg, y, h, noise_var)
    errors = int(np.count_nonzero(qpsk_demap(estimate) != bits))
    return TrialOutcome(errors, bits.size, 10 * math.log10(raw_energy))


@dataclass(frozen=True)
class BERRecord:
    snr_db: float
    waveform: str
    array_mode: str
    detector: str
    n: int
    bit_errors: int
    bits_total: int
    ber: float
    seed: int
    rx_gain_db: float


def _run_point(args) -> TrialOutcome:
    cfg, point, trial, snr = args
    return run_trial(cfg, trial_seed(cfg.seed, point, trial), snr)


def sweep(cfg: SimConfig) -> list[BERRecord]:
    """BER at every SNR grid point, ``cfg.trials`` trials each."""
    if not cfg.snr_db:
        raise ConfigError("SNR grid is empty")
    if cfg.trials < 1:
        raise ConfigError("a sweep needs at least one trial per point")
    jobs = [(cfg, point, trial, snr)
            for point, snr in enumerate(cfg.snr_db) for trial in range(cfg.trials)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(_run_point, jobs, chunksize=max(1, cfg.trials // 4)))
    else:
        outcomes = [_run_point(job) for job in jobs]

    records = []
    for point, snr in enumerate(cfg.snr_db):
        chunk = outcomes[point * cfg.trials:(point + 1) * cfg.trials]
        errors = sum(o.bit_errors for o in chunk)
        total = sum(o.bits_total for o in chunk)
        gain = math.fsum(o.rx_gain_db for o in chunk) / len(chunk)
        records.append(BERRecord(snr, cfg.waveform, cfg.array_mode, cfg.detector, cfg.n,
                                 errors, total, errors / total, cfg.seed, gain))
        log.info("snr=%g dB ber=%.3e (%d/%d)", snr, errors / total, errors, total)
    return records


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(records: Iterable[BERRecord], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow([_fmt(getattr(rec, col)) for col in CSV_COLUMNS])


def emit_csv(records: Sequence[BERRecord], destination: str | FilePath | IO[str]) -> None:
    """Write ``records`` as CSV to a path or an open text stream."""
    records = list(records)
    if not records:
        raise ConfigError("no records to write")
    if hasattr(destination, "write"):
        write_csv(records, destination)
        return
    buf = io.StringIO()
    write_csv(records, buf)
    FilePath(destination).write_text(buf.getvalue())


def read_csv(source: str | FilePath | IO[str]) -> list[BERRecord]:
    text = source.read() if hasattr(source, "read") else FilePath(source).read_text()
    rows = csv.DictReader(io.StringIO(text))
    out = []
    for row in rows:
        out.append(BERRecord(
            snr_db=float(row["snr_db"]), waveform=row["waveform"], array_mode=row["array_mode"],
            detector=row["detector"], n=int(row["n"]), bit_errors=int(row["bit_errors"]),
            bits_total=int(row["bits_total"]), ber=float(row["ber"]), seed=int(row["seed"]),
            rx_gain_db=float(row["rx_gain_db"]),
        ))
    return out
