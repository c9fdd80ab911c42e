import numpy as np
import pytest
from pydantic import ValidationError

from wav2emo.audio import Waveform
from wav2emo.dsp import (
    MelConfig,
    MfccConfig,
    PreprocessConfig,
    StftConfig,
    dct2_ortho,
    fix_length,
    hamming,
    mel_filterbank,
    mel_inverse,
    mel_scale,
    normalize_zscore,
    power_spectrum,
)
from wav2emo.dsp.transforms import (
    dct_matrix,
    fft_radix2,
    frame_signal,
    idct2_ortho,
    mel_band_edges,
)
from wav2emo.errors import ConfigError
from wav2emo.selftest import spectrum_error


def _naive_dft(x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    k = np.arange(n)
    return x @ np.exp(-2j * np.pi * np.outer(k, k) / n).T


def test_normalize_zscore() -> None:
    flat = normalize_zscore(Waveform(samples=np.full(4, 5.0), sample_rate=16000))
    assert flat.samples.tolist() == [0.0, 0.0, 0.0, 0.0]
    pair = normalize_zscore(Waveform(samples=np.array([0.0, 2.0]), sample_rate=8000))
    assert pair.samples.tolist() == [-1.0, 1.0]
    assert pair.sample_rate == 8000


def test_normalize_zscore_moments() -> None:
    rng = np.random.default_rng(0)
    w = Waveform(samples=rng.normal(3.0, 0.2, size=5000), sample_rate=16000)
    once = normalize_zscore(w)
    assert abs(once.samples.mean()) < 1e-9
    assert abs(once.samples.var() - 1.0) < 1e-6
    twice = normalize_zscore(once)
    assert np.allclose(twice.samples, once.samples, atol=1e-6)


def test_fix_length() -> None:
    cfg = PreprocessConfig()
    exact = np.random.default_rng(1).normal(size=96000)
    out = fix_length(Waveform(samples=exact, sample_rate=16000), cfg)
    assert np.array_equal(out.samples, exact)

    short = fix_length(Waveform(samples=np.ones(8000), sample_rate=16000), cfg)
    assert len(short) == 96000
    assert np.all(short.samples[:8000] == 1.0)
    assert np.all(short.samples[8000:] == 0.0)

    long = np.arange(100000, dtype=float)
    clipped = fix_length(Waveform(samples=long, sample_rate=16000), cfg)
    assert np.array_equal(clipped.samples, long[:96000])


def test_fix_length_resamples_first() -> None:
    w = Waveform(samples=np.ones(8000), sample_rate=8000)
    out = fix_length(w, PreprocessConfig(target_seconds=2.0))
    assert out.sample_rate == 16000
    assert len(out) == 32000
    assert np.all(out.samples[:16000] == 1.0)


def test_hamming() -> None:
    assert np.allclose(hamming(3), [0.08, 1.0, 0.08])
    for n in (2, 7, 400):
        w = hamming(n)
        assert len(w) == n
        assert np.allclose(w, w[::-1])
        assert w.max() <= 1.0
    assert hamming(401)[200] == pytest.approx(1.0)
    with pytest.raises(ConfigError):
        hamming(1)


def test_frame_signal() -> None:
    frames = frame_signal(np.arange(10.0), win=4, hop=3)
    assert frames.shape == ((10 - 4) // 3 + 1, 4)
    assert frames[1].tolist() == [3.0, 4.0, 5.0, 6.0]
    with pytest.raises(ConfigError):
        frame_signal(np.arange(3.0), win=4, hop=1)


def test_fft_matches_naive_dft() -> None:
    x = np.random.default_rng(2).normal(size=(3, 64))
    assert np.allclose(fft_radix2(x), _naive_dft(x), atol=1e-9)
    with pytest.raises(ConfigError):
        fft_radix2(np.zeros(12))


def test_power_spectrum_oracle() -> None:
    frames = np.random.default_rng(3).normal(size=(200, 1024))
    fast = power_spectrum(frames, 1024)
    spectrum = _naive_dft(frames)[:, :513]
    slow = np.abs(spectrum) ** 2
    assert fast.shape == (200, 513)
    assert np.max(np.abs(fast - slow) / np.maximum(slow, 1.0)) < 1e-6
    assert spectrum_error(fast, slow) < 1e-6


def test_spectrum_error_is_per_bin() -> None:
    slow = np.array([1e6, 10.0, 0.0])
    assert spectrum_error(np.array([1e6, 10.1, 0.0]), slow) == pytest.approx(0.01)
    # bins under the floor compare absolutely
    assert spectrum_error(np.array([1e6, 10.0, 1e-7]), slow) == pytest.approx(1e-7)


def test_power_spectrum_cosine() -> None:
    n = 1024
    frame = np.cos(2 * np.pi * 4 * np.arange(n) / n)
    power = power_spectrum(frame, n)
    assert power[4] == pytest.approx((n / 2) ** 2)
    others = np.delete(power, 4)
    assert np.max(others) < 1e-6 * power[4]
    assert np.all(power_spectrum(np.zeros(400), n) == 0.0)


def test_power_spectrum_errors() -> None:
    with pytest.raises(ConfigError):
        power_spectrum(np.zeros(100), 1000)
    with pytest.raises(ConfigError):
        power_spectrum(np.zeros(2048), 1024)


def test_mel_scale() -> None:
    assert mel_scale(0.0) == 0.0
    assert mel_scale(1000.0) == pytest.approx(999.99, abs=0.02)
    assert mel_inverse(mel_scale(4000.0)) == pytest.approx(4000.0, abs=1e-6)


def test_filterbank_two_bands() -> None:
    cfg = MelConfig(n_mels=2)
    bank = mel_filterbank(cfg, 1024, 16000)
    assert bank.shape == (2, 513)
    top = mel_scale(8000.0)
    bin_width = 16000 / 1024
    for row, fraction in zip(bank, (1 / 3, 2 / 3)):
        center = mel_inverse(fraction * top)
        assert abs(np.argmax(row) * bin_width - center) <= bin_width
    edges = mel_band_edges(cfg, 16000)
    freqs = np.arange(513) * bin_width
    inside = (freqs > edges[0]) & (freqs < edges[-1])
    assert np.all(bank.sum(axis=0)[inside] > 0.0)


def test_filterbank_default() -> None:
    bank = mel_filterbank(MelConfig(), 1024, 16000)
    edges = mel_band_edges(MelConfig(), 16000)
    bin_width = 16000 / 1024
    assert bank.shape == (128, 513)
    assert np.all(bank >= 0.0)
    assert np.all(bank.sum(axis=1) > 0.0)
    peaks = np.argmax(bank, axis=1) * bin_width
    assert np.all(peaks >= edges[:-2]) and np.all(peaks <= edges[2:])


def test_filterbank_errors() -> None:
    with pytest.raises(ConfigError, match="cover no FFT bin"):
        mel_filterbank(MelConfig(), 64, 16000)
    with pytest.raises(ConfigError):
        mel_filterbank(MelConfig(f_min=9000.0), 1024, 16000)


def test_dct() -> None:
    assert dct2_ortho(np.full(16, 2.0), 16) == pytest.approx(
        [2.0 * 4.0] + [0.0] * 15, abs=1e-12
    )
    x = np.random.default_rng(4).normal(size=16)
    coeffs = dct2_ortho(x, 16)
    assert np.allclose(idct2_ortho(coeffs), x, atol=1e-9)
    assert abs(np.sum(coeffs**2) - np.sum(x**2)) < 1e-9
    assert dct2_ortho(x, 5).shape == (5,)
    with pytest.raises(ConfigError):
        dct2_ortho(x, 17)


def test_dct_orthonormal() -> None:
    for n in (1, 2, 40, 128):
        basis = dct_matrix(n)
        assert np.max(np.abs(basis.T @ basis - np.eye(n))) < 1e-9


def test_config_validation() -> None:
    with pytest.raises(ValidationError):
        StftConfig(n_fft=1000)
    with pytest.raises(ValidationError):
        StftConfig(hop_seconds=0.05)
    with pytest.raises(ValidationError):
        MfccConfig(n_mfcc=200)
    with pytest.raises(ValidationError):
        PreprocessConfig(target_seconds=0.0)
    assert PreprocessConfig().target_length == 96000
