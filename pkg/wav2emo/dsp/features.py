import logging
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from wav2emo.audio.entities import Waveform
from wav2emo.dsp.configs import (
    FrontendConfig,
    MelConfig,
    MfccConfig,
    PreprocessConfig,
    StftConfig,
)
from wav2emo.dsp.transforms import (
    dct2_ortho,
    fix_length,
    frame_signal,
    hamming,
    mel_filterbank,
    normalize_zscore,
    power_spectrum,
)
from wav2emo.errors import ConfigError

logger = logging.getLogger(__name__)

FeatureKind = Literal["logmel", "mfcc"]
Frontend = Literal["raw", "mfcc", "logmel"]
FRONTENDS: tuple[Frontend, ...] = ("raw", "mfcc", "logmel")


class FeatureMatrix(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    values: np.ndarray = Field(description="frames × coefficients")
    frame_rate: float = Field(gt=0.0, description="Frames per second")
    kind: FeatureKind = Field(description="Which frontend produced the matrix")

    @field_validator("values")
    @classmethod
    def ensure_finite_matrix(cls, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError(f"values must be a non-empty matrix, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        return v

    @property
    def n_frames(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_coefficients(self) -> int:
        return int(self.values.shape[1])


def _log_mel_frames(
    x: np.ndarray, sample_rate: int, stft: StftConfig, mel: MelConfig
) -> np.ndarray:
    win = stft.win_length(sample_rate)
    if win > stft.n_fft:
        raise ConfigError(f"window of {win} samples exceeds n_fft {stft.n_fft}")
    frames = frame_signal(x, win, stft.hop_length(sample_rate)) * hamming(win)
    power = power_spectrum(frames, stft.n_fft)
    energies = power @ mel_filterbank(mel, stft.n_fft, sample_rate).T
    return np.log(energies + mel.log_floor)


def log_mel_spectrogram(
    w: Waveform,
    pre: PreprocessConfig = PreprocessConfig(),
    stft: StftConfig = StftConfig(),
    mel: MelConfig = MelConfig(),
) -> FeatureMatrix:
    """normalize, fix_length, hamming frames, power, mel bands, log."""
    x = fix_length(normalize_zscore(w, pre.epsilon), pre)
    values = _log_mel_frames(x.samples, x.sample_rate, stft, mel)
    return FeatureMatrix(
        values=values,
        frame_rate=x.sample_rate / stft.hop_length(x.sample_rate),
        kind="logmel",
    )


def mfcc(
    w: Waveform,
    cfg: MfccConfig = MfccConfig(),
    stft: StftConfig = StftConfig(),
    pre: Optional[PreprocessConfig] = None,
) -> FeatureMatrix:
    """
    Cepstral coefficients of the first clip_seconds of audio. Normalization
    epsilon and sample rate come from `pre`, else the waveform's own rate.
    """
    base = pre if pre is not None else PreprocessConfig(sample_rate=w.sample_rate)
    clip = base.model_copy(update={"target_seconds": cfg.clip_seconds})
    x = fix_length(normalize_zscore(w, clip.epsilon), clip)
    log_mel = _log_mel_frames(x.samples, x.sample_rate, stft, cfg.mel)
    return FeatureMatrix(
        values=dct2_ortho(log_mel, cfg.n_mfcc),
        frame_rate=x.sample_rate / stft.hop_length(x.sample_rate),
        kind="mfcc",
    )


def summarize_mean(fm: FeatureMatrix) -> np.ndarray:
    return fm.values.mean(axis=0)


def extract(w: Waveform, frontend: FeatureKind, cfg: FrontendConfig) -> FeatureMatrix:
    if frontend == "mfcc":
        return mfcc(w, cfg.mfcc, cfg.stft, cfg.preprocess)
    if frontend == "logmel":
        return log_mel_spectrogram(w, cfg.preprocess, cfg.stft, cfg.mel)
    raise ConfigError(f"unknown feature frontend {frontend!r}")


def featurize(w: Waveform, frontend: Frontend, cfg: FrontendConfig) -> np.ndarray:
    """
    Network input for one waveform.

    Returns:
        [1, L] normalized, length-fixed samples for raw input, otherwise the
        feature matrix transposed to [coefficients, frames].
    """
    if frontend == "raw":
        pre = cfg.preprocess
        x = fix_length(normalize_zscore(w, pre.epsilon), pre)
        return x.samples[None, :]
    return extract(w, frontend, cfg).values.T
