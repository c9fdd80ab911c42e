import logging
from functools import lru_cache

import numpy as np

from wav2emo.audio.entities import Waveform
from wav2emo.audio.wav import resample_linear
from wav2emo.dsp.configs import MelConfig, PreprocessConfig
from wav2emo.errors import ConfigError

logger = logging.getLogger(__name__)


def normalize_zscore(w: Waveform, eps: float = 1e-12) -> Waveform:
    """
    Shift to mean 0 and scale to unit population variance.

    Signals whose variance is at most eps are only mean-subtracted.
    """
    x = w.samples
    centered = x - x.mean()
    variance = centered.var()
    if variance > eps:
        centered = centered / np.sqrt(variance)
    return Waveform(samples=centered, sample_rate=w.sample_rate)


def fix_length(w: Waveform, cfg: PreprocessConfig) -> Waveform:
    """Truncate or zero-pad at the end to exactly target_seconds of audio."""
    if w.sample_rate != cfg.sample_rate:
        w = resample_linear(w, cfg.sample_rate)
    target = cfg.target_length
    x = w.samples
    if x.size >= target:
        out = x[:target].copy()
    else:
        out = np.concatenate([x, np.zeros(target - x.size)])
    return Waveform(samples=out, sample_rate=w.sample_rate)


def hamming(n: int) -> np.ndarray:
    if n < 2:
        raise ConfigError(f"hamming window needs at least 2 points, got {n}")
    k = np.arange(n)
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * k / (n - 1))


def frame_signal(x: np.ndarray, win: int, hop: int) -> np.ndarray:
    """Slice x into ⌊(L − win)/hop⌋ + 1 overlapping frames of length win."""
    if hop < 1 or win < 1:
        raise ConfigError(f"window ({win}) and hop ({hop}) must be positive")
    if x.size < win:
        raise ConfigError(f"signal of {x.size} samples is shorter than one frame")
    return np.lib.stride_tricks.sliding_window_view(x, win)[::hop]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and not n & (n - 1)


@lru_cache(maxsize=16)
def _bit_reversal(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def fft_radix2(x: np.ndarray) -> np.ndarray:
    """
    Iterative decimation-in-time radix-2 FFT along the last axis.

    Args:
        x: Real or complex array whose last axis has power-of-two length.

    Returns:
        Complex spectrum with the same shape as x.
    """
    n = x.shape[-1]
    if not _is_power_of_two(n):
        raise ConfigError(f"FFT length must be a power of two, got {n}")
    lead = x.shape[:-1]
    out = np.asarray(x, dtype=np.complex128)[..., _bit_reversal(n)]
    size = 2
    while size <= n:
        half = size // 2
        twiddle = np.exp(-2j * np.pi * np.arange(half) / size)
        blocks = out.reshape(*lead, n // size, size)
        even = blocks[..., :half]
        odd = blocks[..., half:] * twiddle
        out = np.concatenate([even + odd, even - odd], axis=-1).reshape(*lead, n)
        size *= 2
    return out


def power_spectrum(frame: np.ndarray, n_fft: int) -> np.ndarray:
    """
    |DFT_k|² for k = 0..n_fft/2 of zero-padded frames.

    Accepts one frame or a (frames, samples) matrix.
    """
    if not _is_power_of_two(n_fft):
        raise ConfigError(f"n_fft must be a power of two, got {n_fft}")
    frame = np.asarray(frame, dtype=np.float64)
    if frame.shape[-1] > n_fft:
        raise ConfigError(f"frame of {frame.shape[-1]} samples exceeds n_fft {n_fft}")
    pad = [(0, 0)] * (frame.ndim - 1) + [(0, n_fft - frame.shape[-1])]
    spectrum = fft_radix2(np.pad(frame, pad))[..., : n_fft // 2 + 1]
    return spectrum.real**2 + spectrum.imag**2


def mel_scale(f: float | np.ndarray) -> float | np.ndarray:
    return 2595.0 * np.log10(1.0 + np.asarray(f) / 700.0)


def mel_inverse(m: float | np.ndarray) -> float | np.ndarray:
    return 700.0 * (10.0 ** (np.asarray(m) / 2595.0) - 1.0)


def mel_band_edges(cfg: MelConfig, sample_rate: int) -> np.ndarray:
    """n_mels + 2 frequencies equally spaced on the mel axis; inner ones are centers."""
    f_max = cfg.resolved_f_max(sample_rate)
    if not cfg.f_min < f_max <= sample_rate / 2:
        raise ConfigError(
            f"need f_min < f_max <= {sample_rate / 2}, got {cfg.f_min}, {f_max}"
        )
    mels = np.linspace(mel_scale(cfg.f_min), mel_scale(f_max), cfg.n_mels + 2)
    return np.asarray(mel_inverse(mels))


def mel_filterbank(cfg: MelConfig, n_fft: int, sample_rate: int) -> np.ndarray:
    """
    Triangular filters on the linear-frequency FFT bins.

    Returns:
        n_mels × (n_fft/2 + 1) matrix of non-negative weights, each row peaking
        at 1 on its center frequency.
    """
    edges = mel_band_edges(cfg, sample_rate)
    bin_freqs = np.arange(n_fft // 2 + 1) * sample_rate / n_fft
    left, center, right = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    rising = (bin_freqs - left) / (center - left)
    falling = (right - bin_freqs) / (right - center)
    bank = np.maximum(0.0, np.minimum(rising, falling))
    empty = np.flatnonzero(bank.max(axis=1) <= 0.0)
    if empty.size:
        raise ConfigError(
            f"{cfg.n_mels} mel bands are too many for n_fft={n_fft}: "
            f"bands {empty.tolist()} cover no FFT bin"
        )
    return bank


@lru_cache(maxsize=16)
def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II basis; row k is the k-th cosine."""
    k = np.arange(n)[:, None]
    i = np.arange(n)[None, :]
    basis = np.sqrt(2.0 / n) * np.cos(np.pi * (2 * i + 1) * k / (2 * n))
    basis[0] /= np.sqrt(2.0)
    basis.setflags(write=False)
    return basis


def dct2_ortho(x: np.ndarray, n_out: int) -> np.ndarray:
    """Orthonormal DCT-II along the last axis, first n_out coefficients."""
    n = x.shape[-1]
    if not 1 <= n_out <= n:
        raise ConfigError(f"cannot keep {n_out} coefficients of a length-{n} DCT")
    return np.asarray(x, dtype=np.float64) @ dct_matrix(n)[:n_out].T


def idct2_ortho(c: np.ndarray) -> np.ndarray:
    return np.asarray(c, dtype=np.float64) @ dct_matrix(c.shape[-1])
