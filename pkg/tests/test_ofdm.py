import numpy as np
import pytest
from scipy.stats import kurtosis

from codedvlc.modem import QamModem
from codedvlc.ofdm import (
    OfdmConfig,
    TimeSignal,
    hermitian_assemble,
    is_hermitian,
    ofdm_demodulate,
    ofdm_modulate,
    sigma_i_expected,
)

from conftest import naive_dft


def naive_idft(bins):
    # unitary inverse through the conjugation identity
    return np.conj(naive_dft(np.conj(np.asarray(bins, dtype=complex))))


@pytest.fixture(scope="module")
def cfg512():
    return OfdmConfig.build(n_fft=512)


def random_frame(cfg, rng, modem=None):
    modem = modem or QamModem(16)
    labels = rng.integers(0, modem.m_order, cfg.n_data)
    return hermitian_assemble(cfg, modem.map_labels(labels))


def test_build_layouts():
    cfg = OfdmConfig.build(512)
    assert cfg.n_data == 255
    assert cfg.data_indices[0] == 1 and cfg.data_indices[-1] == 255
    cfg64 = OfdmConfig.build(512, reserved=6)
    assert cfg64.n_data == 252
    assert cfg64.data_indices[0] == 4
    with pytest.raises(ValueError):
        OfdmConfig.build(512, reserved=3)
    with pytest.raises(ValueError):
        OfdmConfig(n_fft=512, data_indices=np.array([0, 1]))
    with pytest.raises(ValueError):
        OfdmConfig(n_fft=512, data_indices=np.array([1, 256]))


def test_assemble_zero_and_single(cfg512):
    bins = hermitian_assemble(cfg512, np.zeros(255, dtype=complex))
    assert not bins.any()

    symbols = np.zeros(255, dtype=complex)
    symbols[41 - 1] = 2.0 - 1.0j  # data index 41
    bins = hermitian_assemble(cfg512, symbols)
    assert bins[41] == 2.0 - 1.0j
    assert bins[512 - 41] == 2.0 + 1.0j
    assert np.count_nonzero(bins) == 2


def test_assemble_full_frame_is_hermitian(cfg512, rng):
    bins = random_frame(cfg512, rng)
    assert is_hermitian(bins)
    assert bins[0] == 0 and bins[256] == 0


def test_assemble_length_mismatch(cfg512):
    with pytest.raises(ValueError):
        hermitian_assemble(cfg512, np.zeros(254, dtype=complex))


def test_modulate_zero_frame(cfg512):
    ts = ofdm_modulate(cfg512, np.zeros(512, dtype=complex))
    assert not ts.samples.any()
    assert ts.sigma_i == 0.0


def test_modulate_single_tone_matches_naive_idft():
    cfg = OfdmConfig.build(16)
    symbols = np.zeros(cfg.n_data, dtype=complex)
    symbols[3 - 1] = 1.0  # unit symbol at index k = 3
    bins = hermitian_assemble(cfg, symbols)
    ts = ofdm_modulate(cfg, bins)
    want = naive_idft(bins)
    assert np.max(np.abs(want.imag)) < 1e-12
    assert np.allclose(ts.samples, want.real, atol=1e-12)
    # explicit cosine form for the unitary convention
    n = np.arange(16)
    assert np.allclose(ts.samples, 2 / np.sqrt(16) * np.cos(2 * np.pi * 3 * n / 16), atol=1e-12)


def test_parseval(cfg512, rng):
    bins = random_frame(cfg512, rng)
    ts = ofdm_modulate(cfg512, bins)
    assert np.sum(ts.samples**2) == pytest.approx(np.sum(np.abs(bins) ** 2), rel=1e-12)


def test_round_trip(cfg512, rng):
    for _ in range(5):
        modem = QamModem(16)
        labels = rng.integers(0, 16, 255)
        tx = modem.map_labels(labels)
        bins = hermitian_assemble(cfg512, tx)
        got = ofdm_demodulate(cfg512, ofdm_modulate(cfg512, bins).samples)
        assert np.max(np.abs(got - tx)) < 1e-10


def test_round_trip_with_cyclic_prefix(rng):
    cfg = OfdmConfig.build(512, cp_len=32)
    bins = random_frame(cfg, rng)
    ts = ofdm_modulate(cfg, bins)
    assert ts.samples.size == 512 + 32
    assert np.array_equal(ts.samples[:32], ts.samples[-32:])
    got = ofdm_demodulate(cfg, ts.samples)
    assert np.max(np.abs(got - bins[cfg.data_indices])) < 1e-10


def test_non_hermitian_frame_rejected(cfg512):
    bins = np.zeros(512, dtype=complex)
    bins[3] = 1.0  # no mirror
    with pytest.raises(ValueError, match="Hermitian"):
        ofdm_modulate(cfg512, bins)


def test_demodulate_zero_and_length(cfg512):
    assert not ofdm_demodulate(cfg512, np.zeros(512)).any()
    with pytest.raises(ValueError):
        ofdm_demodulate(cfg512, np.zeros(500))


def test_sigma_i_expected_values(cfg512):
    assert sigma_i_expected(cfg512, 1.0, 0) == 0.0
    assert sigma_i_expected(cfg512, 1.0, 255) == pytest.approx(np.sqrt(510 / 512), rel=1e-12)
    full = sigma_i_expected(cfg512, 1.0, 200)
    half = sigma_i_expected(cfg512, 1.0, 100)
    assert half**2 == pytest.approx(full**2 / 2, rel=1e-12)


def test_sigma_i_matches_sample_variance(cfg512, rng):
    modem = QamModem(16)
    total = 0.0
    count = 0
    frames = 10_000
    for _ in range(frames):
        bins = random_frame(cfg512, rng, modem)
        body = ofdm_modulate(cfg512, bins).samples
        total += np.sum(body**2)
        count += body.size
    measured = total / count
    assert measured == pytest.approx(sigma_i_expected(cfg512) ** 2, rel=0.01)


def test_time_samples_approximately_gaussian(cfg512, rng):
    modem = QamModem(16)
    samples = np.concatenate(
        [ofdm_modulate(cfg512, random_frame(cfg512, rng, modem)).samples for _ in range(200)]
    )
    assert samples.size > 100_000
    k = kurtosis(samples, fisher=False)
    assert 2.8 <= k <= 3.2


def test_time_signal_sigma_measured(cfg512, rng):
    bins = random_frame(cfg512, rng)
    ts = ofdm_modulate(cfg512, bins)
    assert isinstance(ts, TimeSignal)
    assert ts.sigma_i == pytest.approx(np.sqrt(np.mean(ts.samples**2)), rel=1e-12)
