from .corpus import (
    Convention,
    label_distribution,
    merge_manifests,
    read_manifest,
    render_distribution,
    scan_corpus,
    write_manifest,
)
from .entities import (
    CANONICAL_EMOTIONS,
    CANONICAL_RATE,
    DatasetManifest,
    DataSplit,
    EmotionLabel,
    ManifestEntry,
    Waveform,
)
from .split import split_by_speaker, split_stratified
from .wav import load_waveform, parse_wav, resample_linear, write_wav

__all__ = [
    "CANONICAL_EMOTIONS",
    "CANONICAL_RATE",
    "Convention",
    "DataSplit",
    "DatasetManifest",
    "EmotionLabel",
    "ManifestEntry",
    "Waveform",
    "label_distribution",
    "load_waveform",
    "merge_manifests",
    "parse_wav",
    "read_manifest",
    "render_distribution",
    "resample_linear",
    "scan_corpus",
    "split_by_speaker",
    "split_stratified",
    "write_manifest",
    "write_wav",
]
