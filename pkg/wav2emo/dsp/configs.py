from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from wav2emo.audio.entities import CANONICAL_RATE


class PreprocessConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    target_seconds: float = Field(
        default=6.0, gt=0.0, description="Clip/pad length of every waveform"
    )
    sample_rate: int = Field(default=CANONICAL_RATE, gt=0, description="Hz")
    epsilon: float = Field(
        default=1e-12, gt=0.0, description="Variance floor of z-score normalization"
    )

    @property
    def target_length(self) -> int:
        return round(self.target_seconds * self.sample_rate)


class StftConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    n_fft: int = Field(default=1024, description="FFT size, a power of two")
    win_seconds: float = Field(default=0.025, gt=0.0, description="Frame length")
    hop_seconds: float = Field(default=0.010, gt=0.0, description="Frame advance")
    window: Literal["hamming"] = Field(default="hamming", description="Taper")

    @field_validator("n_fft")
    @classmethod
    def ensure_power_of_two(cls, v: int) -> int:
        if v < 2 or v & (v - 1):
            raise ValueError(f"n_fft must be a power of two, got {v}")
        return v

    @model_validator(mode="after")
    def ensure_hop_within_window(self) -> "StftConfig":
        if self.hop_seconds > self.win_seconds:
            raise ValueError("hop_seconds must not exceed win_seconds")
        return self

    def win_length(self, sample_rate: int) -> int:
        return round(self.win_seconds * sample_rate)

    def hop_length(self, sample_rate: int) -> int:
        return round(self.hop_seconds * sample_rate)


class MelConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    n_mels: int = Field(default=128, ge=1, description="Number of mel bands")
    f_min: float = Field(default=0.0, ge=0.0, description="Lowest edge in Hz")
    f_max: Optional[float] = Field(
        default=None, description="Highest edge in Hz; Nyquist when unset"
    )
    log_floor: float = Field(
        default=1e-10, gt=0.0, description="Added before the logarithm"
    )

    def resolved_f_max(self, sample_rate: int) -> float:
        return sample_rate / 2 if self.f_max is None else self.f_max


class MfccConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    n_mfcc: int = Field(default=40, ge=1, description="Cepstral coefficients kept")
    clip_seconds: float = Field(
        default=2.5, gt=0.0, description="Leading audio used for extraction"
    )
    mel: MelConfig = Field(default_factory=MelConfig)

    @model_validator(mode="after")
    def ensure_fits_mel_bands(self) -> "MfccConfig":
        if self.n_mfcc > self.mel.n_mels:
            raise ValueError(
                f"n_mfcc ({self.n_mfcc}) exceeds n_mels ({self.mel.n_mels})"
            )
        return self


class FrontendConfig(BaseModel):
    """Every knob of the three input paths (raw, mfcc, logmel)."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    preprocess: PreprocessConfig = Field(default_factory=PreprocessConfig)
    stft: StftConfig = Field(default_factory=StftConfig)
    mel: MelConfig = Field(default_factory=MelConfig)
    mfcc: MfccConfig = Field(default_factory=MfccConfig)
