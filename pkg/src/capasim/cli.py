"""Command line entry point: ``capasim {sweep,trial,matrices}``."""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import fields
from pathlib import Path as FilePath

import numpy as np

from .config import SimConfig, parse_value, read_config_file
from .errors import ConfigError, NumericFailureError
from .harness import build_channel, emit_csv, run_trial, sweep, trial_seed, write_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=FilePath, help="flat key=value config file")
    group = parser.add_argument_group("scenario (overrides --config)")
    for f in fields(SimConfig):
        group.add_argument(f"--{f.name.replace('_', '-')}", dest=f"cfg_{f.name}",
                           metavar=f.name.upper(), help=f"default: {f.default!r}"
                           if not callable(f.default_factory) else None)


def config_from_args(args: argparse.Namespace) -> SimConfig:
    values = read_config_file(args.config) if args.config else {}
    for f in fields(SimConfig):
        raw = getattr(args, f"cfg_{f.name}")
        if raw is not None:
            values[f.name] = parse_value(f.name, raw)
    try:
        return SimConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def write_matrix(matrix: np.ndarray, path: FilePath) -> None:
    """Plain-text dump: ``rows cols`` header, then one row per line of ``re,im`` pairs."""
    matrix = np.atleast_2d(matrix)
    lines = [f"{matrix.shape[0]} {matrix.shape[1]}"]
    for row in matrix:
        lines.append(" ".join(f"{z.real:.17g},{z.imag:.17g}" for z in row))
    path.write_text("\n".join(lines) + "\n")


def read_matrix(path: FilePath) -> np.ndarray:
    header, *rows = FilePath(path).read_text().splitlines()
    n_rows, n_cols = map(int, header.split())
    out = np.array([[complex(*map(float, pair.split(","))) for pair in row.split()]
                    for row in rows], dtype=complex)
    if out.shape != (n_rows, n_cols):
        raise ValueError(f"{path}: header says {n_rows}x{n_cols}, body is {out.shape}")
    return out


def cmd_sweep(args, cfg: SimConfig) -> None:
    records = sweep(cfg)
    if args.out:
        emit_csv(records, args.out)
    else:
        write_csv(records, sys.stdout)


def cmd_trial(args, cfg: SimConfig) -> None:
    snr = args.snr if args.snr is not None else cfg.snr_db[0]
    seed = trial_seed(cfg.seed, args.point, args.trial)
    realization = build_channel(cfg, np.random.default_rng(seed.spawn(3)[0]))
    outcome = run_trial(cfg, seed, snr)
    print(f"waveform={cfg.waveform} array_mode={cfg.array_mode} detector={cfg.detector} "
          f"n={cfg.n} snr_db={snr:g}")
    for i, (p, h) in enumerate(zip(realization.paths, realization.per_path_mimo), 1):
        print(f"path {i}: gain={p.gain:.6e} delay_s={p.delay:.6e} doppler_hz={p.doppler:.4f} "
              f"d_tx={p.d_tx:.2f} d_rx={p.d_rx:.2f} |H|={abs(h[0, 0]):.6e}")
    print(f"row_energy_db={10 * math.log10(realization.row_energy):.4f} "
          f"bit_errors={outcome.bit_errors} bits_total={outcome.bits_total}")


def cmd_matrices(args, cfg: SimConfig) -> None:
    seed = trial_seed(cfg.seed, args.point, args.trial)
    realization = build_channel(cfg, np.random.default_rng(seed.spawn(3)[0]))
    out = FilePath(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    for i, (h, g) in enumerate(zip(realization.per_path_mimo, realization.per_path_g), 1):
        write_matrix(h, out / f"Hhat_{i}.txt")
        write_matrix(g, out / f"G_{i}.txt")
    write_matrix(realization.matrix, out / "H.txt")
    print(f"wrote {2 * len(realization.paths) + 1} matrices to {out}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="capasim", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="BER over the SNR grid, written as CSV")
    p.add_argument("--out", type=FilePath, help="CSV destination (default stdout)")
    _add_config_flags(p)
    p.set_defaults(func=cmd_sweep)

    for name, func, help_text in (
        ("trial", cmd_trial, "run one trial and print its paths and error count"),
        ("matrices", cmd_matrices, "dump per-path and full channel matrices"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--point", type=int, default=0, help="SNR point index used in seeding")
        p.add_argument("--trial", type=int, default=0, help="trial index used in seeding")
        if name == "trial":
            p.add_argument("--snr", type=float, help="SNR in dB (default: first grid point)")
        else:
            p.add_argument("--out", type=FilePath, help="output directory")
        _add_config_flags(p)
        p.set_defaults(func=func)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        args.func(args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericFailureError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
