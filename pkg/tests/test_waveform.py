import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capasim.errors import InvalidDimensionError, InvalidInputError, InvalidSpecError
from capasim.linalg import cyclic_shift_matrix, frobenius_distance_to_identity
from capasim.waveform import (
    NormalizedPath,
    WaveformSpec,
    afdm_chirp_matrix,
    afdm_transform,
    assemble_effective_channel,
    cpp_matrix,
    default_afdm_c1,
    doppler_matrix,
    normalize_path,
    subcarrier_matrix,
    subcarrier_matrix_afdm,
    subcarrier_matrix_ofdm,
    subcarrier_matrix_otfs,
)
from conftest import haar_unitary, random_complex


def test_doppler_matrix():
    assert np.array_equal(doppler_matrix(5, 0.0), np.eye(5))
    assert doppler_matrix(4, 1.0)[1, 1] == pytest.approx(-1j)
    assert np.allclose(doppler_matrix(7, 0.3), doppler_matrix(7, -0.3).conj().T)


def test_afdm_chirp_matrix():
    assert np.array_equal(afdm_chirp_matrix(6, 0.0), np.eye(6))
    assert afdm_chirp_matrix(2, 0.25)[1, 1] == pytest.approx(-1j)
    lam = afdm_chirp_matrix(9, 0.137)
    assert np.allclose(lam @ lam.conj().T, np.eye(9))


def test_cpp_matrix():
    assert np.array_equal(cpp_matrix(6, 0.2, 0), np.eye(6))
    assert np.allclose(cpp_matrix(6, 0.0, 4), np.eye(6))
    # n=4, c1=1/8, zeta=1: exp(-j 2 pi (16 - 8)/8) = 1
    assert np.allclose(cpp_matrix(4, 1 / 8, 1), np.eye(4), atol=1e-12)
    with pytest.raises(InvalidInputError):
        cpp_matrix(4, 0.1, 4)


def test_cpp_entries_follow_formula():
    n, c1, zeta = 8, 0.037, 3
    d = np.diagonal(cpp_matrix(n, c1, zeta))
    for m in range(n):
        want = cmath.exp(-2j * math.pi * c1 * (n * n - 2 * n * (zeta - m))) if m < zeta else 1
        assert d[m] == pytest.approx(want, abs=1e-12)


def test_ofdm_identity_and_pure_delay():
    spec = WaveformSpec.ofdm(8)
    assert np.allclose(subcarrier_matrix_ofdm(spec, NormalizedPath(1, 0, 0.0)), np.eye(8), atol=1e-14)
    g = subcarrier_matrix_ofdm(spec, NormalizedPath(1, 2, 0.0))
    want = np.exp(-2j * np.pi * 2 * np.arange(8) / 8)
    assert np.allclose(np.diagonal(g), want, atol=1e-12)
    assert np.linalg.norm(g - np.diag(np.diagonal(g))) < 1e-10


def _otfs_4x4_by_hand(zeta, f):
    # (F_2 kron I_2) Z^f Pi^zeta (F_2^H kron I_2), every entry summed explicitly
    def t(row, col):
        i1, i2 = divmod(row, 2)
        j1, j2 = divmod(col, 2)
        return cmath.exp(-2j * math.pi * i1 * j1 / 2) / math.sqrt(2) if i2 == j2 else 0

    def inner(k, l):
        return cmath.exp(-2j * math.pi * f * k / 4) if l == (k - zeta) % 4 else 0

    out = np.zeros((4, 4), dtype=complex)
    for a in range(4):
        for b in range(4):
            out[a, b] = sum(t(a, k) * inner(k, l) * t(b, l).conjugate()
                            for k in range(4) for l in range(4))
    return out


def test_otfs_against_hand_product():
    spec = WaveformSpec.otfs(4, 2, 2)
    got = subcarrier_matrix_otfs(spec, NormalizedPath(1, 1, 0.0))
    assert np.allclose(got, _otfs_4x4_by_hand(1, 0.0), atol=1e-14)
    got = subcarrier_matrix_otfs(spec, NormalizedPath(1, 3, 0.41))
    assert np.allclose(got, _otfs_4x4_by_hand(3, 0.41), atol=1e-14)


def test_otfs_degenerate_split():
    spec = WaveformSpec.otfs(12, 1, 12)
    p = NormalizedPath(1, 5, -0.7)
    want = doppler_matrix(12, -0.7) @ cyclic_shift_matrix(12, 5)
    assert np.allclose(subcarrier_matrix_otfs(spec, p), want, atol=1e-12, rtol=0)
    assert np.allclose(subcarrier_matrix_otfs(WaveformSpec.otfs(12, 3, 4), NormalizedPath(1, 0, 0)),
                       np.eye(12), atol=1e-14)


def test_otfs_spec_validation():
    with pytest.raises(InvalidSpecError):
        WaveformSpec("otfs", 12, n1=5, n2=2)
    with pytest.raises(InvalidSpecError):
        subcarrier_matrix_otfs(WaveformSpec.ofdm(4), NormalizedPath(1, 0, 0))
    assert WaveformSpec.otfs(64).n1 == 8
    assert WaveformSpec.otfs(144).n1 == 12


def test_afdm_reduces_to_ofdm_without_chirps():
    spec = WaveformSpec("afdm", 10, c1=0.0, c2=0.0)
    assert np.allclose(subcarrier_matrix_afdm(spec, NormalizedPath(1, 0, 0.0)), np.eye(10), atol=1e-14)
    for zeta, f in [(0, 0.0), (3, 0.25), (9, -1.6)]:
        p = NormalizedPath(1, zeta, f)
        assert np.allclose(subcarrier_matrix_afdm(spec, p),
                           subcarrier_matrix_ofdm(WaveformSpec.ofdm(10), p), atol=1e-12, rtol=0)


def test_afdm_equals_conjugated_time_domain_channel():
    n, c1, c2 = 8, 3 / 16, 0.05
    spec = WaveformSpec.afdm(n, c1, c2)
    p = NormalizedPath(1, 2, 0.3)
    a = afdm_transform(n, c1, c2)
    inner = cpp_matrix(n, c1, 2) @ doppler_matrix(n, 0.3) @ cyclic_shift_matrix(n, 2)
    assert np.allclose(subcarrier_matrix_afdm(spec, p), a @ inner @ a.conj().T, atol=1e-12)


def test_afdm_spec_validation_and_default_chirp():
    with pytest.raises(InvalidSpecError):
        WaveformSpec("afdm", 8, c1=-0.1)
    assert default_afdm_c1(64, 0.0625) == pytest.approx(3 / 128)
    assert default_afdm_c1(64, 2.0) == pytest.approx(5 / 128)
    assert WaveformSpec.afdm(64, max_doppler=0.06).c1 == pytest.approx(3 / 128)


def test_waveform_kind_is_checked():
    with pytest.raises(InvalidSpecError):
        subcarrier_matrix_ofdm(WaveformSpec.afdm(4, 0.1), NormalizedPath(1, 0, 0))
    with pytest.raises(InvalidSpecError):
        subcarrier_matrix_afdm(WaveformSpec.ofdm(4), NormalizedPath(1, 0, 0))
    with pytest.raises(InvalidInputError):
        subcarrier_matrix(WaveformSpec.ofdm(4), NormalizedPath(1, 4, 0))


SPECS = st.sampled_from([
    WaveformSpec.ofdm(16), WaveformSpec.otfs(16, 4, 4), WaveformSpec.otfs(16, 2, 8),
    WaveformSpec.afdm(16, 3 / 32), WaveformSpec.afdm(16, 0.21, 0.013),
])


@settings(max_examples=60, deadline=None)
@given(spec=SPECS, zeta=st.integers(0, 15), f=st.floats(-3, 3, allow_nan=False))
def test_every_path_matrix_is_unitary(spec, zeta, f):
    g = subcarrier_matrix(spec, NormalizedPath(1, zeta, f))
    assert frobenius_distance_to_identity(g) < 1e-10


def test_normalize_path():
    p = normalize_path(0.5, 3.2e-6, 976.0, 1e6, 64)
    assert p.delay_taps == 3
    assert p.doppler == pytest.approx(976.0 * 64 / 1e6)


def test_assemble_examples(rng):
    eye = np.eye(6)
    assert np.allclose(assemble_effective_channel([[[1]]], [eye]), eye)
    assert np.allclose(assemble_effective_channel([[[1]], [[1]]], [eye, eye]), 2 * eye)


def test_assemble_matches_entrywise_sum(rng):
    n, m = 5, 2
    hs = [random_complex(rng, m, m) for _ in range(3)]
    gs = [haar_unitary(n, rng) for _ in range(3)]
    want = np.zeros((n * m, n * m), dtype=complex)
    for h, g in zip(hs, gs):
        for i in range(m):
            for j in range(m):
                for k in range(n):
                    for l in range(n):
                        want[i * n + k, j * n + l] += h[i, j] * g[k, l]
    assert np.allclose(assemble_effective_channel(hs, gs), want, atol=1e-13)


def test_assemble_is_linear(rng):
    gs = [haar_unitary(4, rng) for _ in range(2)]
    h1 = [random_complex(rng, 1, 1) for _ in range(2)]
    h2 = [random_complex(rng, 1, 1) for _ in range(2)]
    combined = assemble_effective_channel([2 * a - 3j * b for a, b in zip(h1, h2)], gs)
    split = 2 * assemble_effective_channel(h1, gs) - 3j * assemble_effective_channel(h2, gs)
    assert np.allclose(combined, split, atol=1e-13)


def test_assemble_rejects_mismatch():
    with pytest.raises(InvalidInputError):
        assemble_effective_channel([[[1]]], [np.eye(2), np.eye(2)])
    with pytest.raises(InvalidInputError):
        assemble_effective_channel([], [])
    with pytest.raises(InvalidDimensionError):
        assemble_effective_channel([[[1]], np.eye(2)], [np.eye(2), np.eye(2)])
