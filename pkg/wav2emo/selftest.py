import logging
from typing import Callable, List, Tuple

import numpy as np
from pydantic import BaseModel, Field

from wav2emo.audio import Waveform, parse_wav, write_wav
from wav2emo.dsp import FrontendConfig, log_mel_spectrogram, mfcc, power_spectrum
from wav2emo.dsp.transforms import dct_matrix
from wav2emo.nn import ArrayDataset, gradient_check, load_arch

logger = logging.getLogger(__name__)

GRADIENT_TOLERANCE = 1e-5
FFT_TOLERANCE = 1e-6
# power below this counts as zero when comparing spectra entrywise
FFT_FLOOR = 1.0
DCT_TOLERANCE = 1e-9


class CheckResult(BaseModel):
    name: str = Field(description="What was checked")
    passed: bool
    detail: str = Field(description="Measured value against its bound")


def toy_sample(arch_name: str, batch: int = 4, seed: int = 0) -> ArrayDataset:
    """Seeded random inputs for a bundled toy architecture, alternating labels."""
    arch = load_arch(arch_name)
    rng = np.random.default_rng(seed)
    inputs = rng.normal(size=(batch, *arch.resolved_input_shape))
    labels = np.arange(batch) % arch.n_classes
    return ArrayDataset(inputs=inputs, labels=labels)


def _gradient(arch_name: str, wrt: str = "logits") -> Callable[[], CheckResult]:
    def check() -> CheckResult:
        error = gradient_check(
            load_arch(arch_name),
            toy_sample(arch_name),
            tolerance=GRADIENT_TOLERANCE,
            wrt="probs" if wrt == "probs" else "logits",
        )
        return CheckResult(
            name=f"gradient {arch_name} ({wrt})",
            passed=error < GRADIENT_TOLERANCE,
            detail=f"max relative error {error:.2e} < {GRADIENT_TOLERANCE:.0e}",
        )

    return check


def naive_power_spectrum(frames: np.ndarray) -> np.ndarray:
    n = frames.shape[-1]
    k = np.arange(n // 2 + 1)[:, None]
    basis = np.exp(-2j * np.pi * k * np.arange(n)[None, :] / n)
    spectrum = frames @ basis.T
    return spectrum.real**2 + spectrum.imag**2


def spectrum_error(fast: np.ndarray, slow: np.ndarray) -> float:
    """Largest per-bin relative error, with FFT_FLOOR as the denominator's floor."""
    return float(np.max(np.abs(fast - slow) / np.maximum(np.abs(slow), FFT_FLOOR)))


def check_fft() -> CheckResult:
    frames = np.random.default_rng(0).normal(size=(200, 1024))
    fast = power_spectrum(frames, 1024)
    slow = naive_power_spectrum(frames)
    error = spectrum_error(fast, slow)
    return CheckResult(
        name="fft vs naive dft",
        passed=error < FFT_TOLERANCE,
        detail=f"max relative error {error:.2e} < {FFT_TOLERANCE:.0e}",
    )


def check_dct() -> CheckResult:
    deviation = max(
        float(np.max(np.abs(dct_matrix(n) @ dct_matrix(n).T - np.eye(n))))
        for n in (40, 128, 257)
    )
    return CheckResult(
        name="dct orthonormality",
        passed=deviation < DCT_TOLERANCE,
        detail=f"max deviation {deviation:.2e} < {DCT_TOLERANCE:.0e}",
    )


def check_wav_round_trip() -> CheckResult:
    t = np.arange(16000) / 16000
    tone = Waveform(samples=0.5 * np.sin(2 * np.pi * 440 * t), sample_rate=16000)
    peak = float(np.max(np.abs(parse_wav(write_wav(tone)).samples)))
    return CheckResult(
        name="pcm16 round trip",
        passed=abs(peak - 0.5) <= 1 / 32768,
        detail=f"peak {peak:.6f}, expected 0.5 +/- 1/32768",
    )


def check_feature_shapes() -> CheckResult:
    cfg = FrontendConfig()
    noise = np.random.default_rng(0).normal(scale=0.1, size=3 * 16000)
    w = Waveform(samples=noise, sample_rate=16000)
    mfcc_shape = mfcc(w, cfg.mfcc, cfg.stft).values.shape
    logmel = log_mel_spectrogram(w, cfg.preprocess, cfg.stft, cfg.mel)
    logmel_shape = logmel.values.shape
    return CheckResult(
        name="frontend shapes",
        passed=mfcc_shape == (248, 40) and logmel_shape == (598, 128),
        detail=f"mfcc {mfcc_shape}, logmel {logmel_shape}",
    )


CHECKS: List[Tuple[str, Callable[[], CheckResult]]] = [
    ("gradient-cnn", _gradient("cnn-toy")),
    ("gradient-softmax", _gradient("cnn-toy", wrt="probs")),
    ("gradient-lstm", _gradient("lstm-toy")),
    ("gradient-cnn-lstm", _gradient("cnn-lstm-toy")),
    ("fft", check_fft),
    ("dct", check_dct),
    ("wav", check_wav_round_trip),
    ("shapes", check_feature_shapes),
]


def run_selftest() -> List[CheckResult]:
    results = []
    for key, check in CHECKS:
        try:
            result = check()
        except Exception as e:
            result = CheckResult(name=key, passed=False, detail=f"raised {e!r}")
        if result.passed:
            logger.debug(f"{result.name}: {result.detail}")
        else:
            logger.warning(f"Warning: {result.name} failed: {result.detail}")
        results.append(result)
    return results
