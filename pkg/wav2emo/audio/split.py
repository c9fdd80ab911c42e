import logging
import math
from typing import List

import numpy as np

from wav2emo.audio.entities import DatasetManifest, DataSplit
from wav2emo.errors import StratifyError

logger = logging.getLogger(__name__)


def _check_ratio(ratio: float) -> None:
    if not 0.0 < ratio < 1.0:
        raise StratifyError(f"split ratio must lie in (0, 1), got {ratio}")


def _train_count(ratio: float, n: int) -> int:
    # ceiling, but every group keeps at least one held-out member
    return min(math.ceil(round(ratio * n, 9)), n - 1)


def split_stratified(m: DatasetManifest, ratio: float, seed: int) -> DataSplit:
    """
    Partition a manifest into train/test with per-class proportions preserved.

    Each class is shuffled by one seeded PRNG (classes visited in label_set
    order) and its first ⌈ratio·n⌉ members go to train.

    Args:
        m: Source manifest.
        ratio: Training fraction in (0, 1).
        seed: PRNG seed.

    Returns:
        DataSplit whose partitions keep the manifest's entry order.
    """
    _check_ratio(ratio)
    labels = m.label_ids()
    rng = np.random.default_rng(seed)
    train_idx: List[int] = []
    for label in m.label_set:
        members = np.flatnonzero(labels == label.id)
        if members.size < 2:
            raise StratifyError(
                f"class {label.name} has {members.size} samples, need at least 2"
            )
        members = rng.permutation(members)
        train_idx.extend(members[: _train_count(ratio, members.size)].tolist())
    return _make_split(m, train_idx, ratio, seed)


def split_by_speaker(m: DatasetManifest, ratio: float, seed: int) -> DataSplit:
    """Group split: no speaker appears in both partitions."""
    _check_ratio(ratio)
    speakers = sorted({entry.speaker for entry in m.entries})
    if len(speakers) < 2:
        raise StratifyError(f"need at least 2 speakers, found {len(speakers)}")
    rng = np.random.default_rng(seed)
    shuffled = [speakers[i] for i in rng.permutation(len(speakers))]
    train_speakers = set(shuffled[: _train_count(ratio, len(speakers))])
    train_idx = [i for i, e in enumerate(m.entries) if e.speaker in train_speakers]
    split = _make_split(m, train_idx, ratio, seed)
    missing = set(split.test.label_names) - {e.label.name for e in split.test.entries}
    if missing:
        logger.warning(f"Warning: speaker split leaves no test samples for {missing}")
    return split


def _make_split(
    m: DatasetManifest, train_idx: List[int], ratio: float, seed: int
) -> DataSplit:
    chosen = set(train_idx)
    train = sorted(chosen)
    test = [i for i in range(len(m)) if i not in chosen]
    logger.debug(f"Split {len(m)} entries into {len(train)} train / {len(test)} test")
    return DataSplit(train=m.subset(train), test=m.subset(test), seed=seed, ratio=ratio)
