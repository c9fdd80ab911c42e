from .configs import FrontendConfig, MelConfig, MfccConfig, PreprocessConfig, StftConfig
from .container import export_features_csv, read_features, write_features
from .features import (
    FRONTENDS,
    FeatureMatrix,
    Frontend,
    extract,
    featurize,
    log_mel_spectrogram,
    mfcc,
    summarize_mean,
)
from .transforms import (
    dct2_ortho,
    fix_length,
    hamming,
    mel_filterbank,
    mel_inverse,
    mel_scale,
    normalize_zscore,
    power_spectrum,
)

__all__ = [
    "FRONTENDS",
    "FeatureMatrix",
    "Frontend",
    "FrontendConfig",
    "MelConfig",
    "MfccConfig",
    "PreprocessConfig",
    "StftConfig",
    "dct2_ortho",
    "export_features_csv",
    "extract",
    "featurize",
    "fix_length",
    "hamming",
    "log_mel_spectrogram",
    "mel_filterbank",
    "mel_inverse",
    "mel_scale",
    "mfcc",
    "normalize_zscore",
    "power_spectrum",
    "read_features",
    "summarize_mean",
    "write_features",
]
