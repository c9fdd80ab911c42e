from pathlib import Path
from typing import Callable

import numpy as np
import pytest

from wav2emo.audio import Waveform, write_wav

TONES = {"happy": 300.0, "sad": 1200.0, "angry": 3000.0}


def write_tone_corpus(
    root: Path, clips_per_class: int = 6, seconds: float = 0.5
) -> Path:
    """Noisy tones, one frequency per emotion, and their manifest.csv."""
    rng = np.random.default_rng(0)
    t = np.arange(int(seconds * 16000)) / 16000
    rows = ["path,label,speaker"]
    for label, frequency in TONES.items():
        for i in range(clips_per_class):
            tone = 0.5 * np.sin(2 * np.pi * frequency * t + rng.uniform(0, 2 * np.pi))
            samples = tone + 0.01 * rng.normal(size=t.size)
            name = f"clips/{label}_{i}.wav"
            path = root / name
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(write_wav(Waveform(samples=samples, sample_rate=16000)))
            rows.append(f"{name},{label},s{i % 3}")
    manifest = root / "manifest.csv"
    manifest.write_text("\n".join(rows) + "\n")
    return manifest


@pytest.fixture
def make_tone_corpus() -> Callable[..., Path]:
    return write_tone_corpus


@pytest.fixture
def tone_manifest(tmp_path: Path) -> Path:
    return write_tone_corpus(tmp_path / "corpus")
