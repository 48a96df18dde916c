import numpy as np
import pytest

from capasim.cli import main, read_matrix, write_matrix
from capasim.harness import read_csv


def test_sweep_to_csv(tmp_path):
    out = tmp_path / "ber.csv"
    code = main(["sweep", "--n", "16", "--trials", "3", "--snr-db", "0 10", "--out", str(out)])
    assert code == 0
    records = read_csv(out)
    assert [r.snr_db for r in records] == [0.0, 10.0]
    assert all(r.bits_total == 96 for r in records)


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("n = 16\ntrials = 2\nsnr_db = 5\nwaveform = ofdm\n")
    assert main(["sweep", "--config", str(cfg), "--waveform", "otfs"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[1].startswith("5.0,otfs,continuous,gabp,16,")


def test_validation_exit_code(capsys):
    assert main(["sweep", "--waveform", "fbmc"]) == 2
    assert "config error" in capsys.readouterr().err
    assert main(["sweep", "--n", "abc"]) == 2
    assert main(["trial", "--config", "/nonexistent/file.cfg"]) == 2


def test_trial_dump(capsys):
    assert main(["trial", "--n", "16", "--snr", "20"]) == 0
    text = capsys.readouterr().out
    assert text.count("path ") == 5 and "bit_errors=" in text


def test_matrices_dump(tmp_path):
    assert main(["matrices", "--n", "8", "--r-max", "300", "--out", str(tmp_path)]) == 0
    h = read_matrix(tmp_path / "H.txt")
    assert h.shape == (8, 8)
    g = read_matrix(tmp_path / "G_1.txt")
    assert np.allclose(g @ g.conj().T, np.eye(8), atol=1e-12)
    assert (tmp_path / "H.txt").read_text().splitlines()[0] == "8 8"


def test_matrix_text_round_trip(tmp_path):
    m = np.array([[1 + 2j, -0.5], [1e-300j, np.pi]])
    write_matrix(m, tmp_path / "m.txt")
    assert np.array_equal(read_matrix(tmp_path / "m.txt"), m)


def test_numeric_failure_exit_code(monkeypatch):
    from capasim import cli
    from capasim.errors import NumericFailureError

    def boom(*_):
        raise NumericFailureError("singular")

    monkeypatch.setattr(cli, "sweep", boom)
    assert main(["sweep", "--n", "16"]) == 3
