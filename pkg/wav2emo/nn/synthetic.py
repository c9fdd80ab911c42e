from typing import List, Sequence, Tuple

import numpy as np

from wav2emo.audio.entities import CANONICAL_RATE, Waveform

DEFAULT_FREQUENCIES = (300.0, 600.0, 1200.0, 2400.0)


def synthetic_tone_corpus(
    frequencies: Sequence[float] = DEFAULT_FREQUENCIES,
    clips_per_class: int = 200,
    seconds: float = 1.0,
    snr_db: float = 10.0,
    sample_rate: int = CANONICAL_RATE,
    seed: int = 0,
) -> Tuple[List[Waveform], np.ndarray]:
    """
    One class per frequency: unit-amplitude sines with random phase plus white
    noise at the given signal-to-noise ratio. Clips are interleaved by class.
    """
    rng = np.random.default_rng(seed)
    n = int(round(seconds * sample_rate))
    t = np.arange(n) / sample_rate
    # a unit sine has power 1/2
    noise_std = np.sqrt(0.5 / 10.0 ** (snr_db / 10.0))
    clips: List[Waveform] = []
    labels: List[int] = []
    for _ in range(clips_per_class):
        for label, frequency in enumerate(frequencies):
            phase = rng.uniform(0.0, 2.0 * np.pi)
            tone = np.sin(2.0 * np.pi * frequency * t + phase)
            noisy = tone + rng.normal(0.0, noise_std, size=n)
            clips.append(Waveform(samples=noisy, sample_rate=sample_rate))
            labels.append(label)
    return clips, np.asarray(labels, dtype=np.int64)
