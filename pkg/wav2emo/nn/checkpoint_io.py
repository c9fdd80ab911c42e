import logging
from pathlib import Path
from typing import Dict, Union

import numpy as np
from pydantic import ValidationError

from wav2emo.errors import ConfigError, ParseError
from wav2emo.nn.network import AdamState, Checkpoint
from wav2emo.nn.specs import ArchConfig
from wav2emo.utils import dump_model_container, load_model_container

logger = logging.getLogger(__name__)

MODEL_KIND = "nn"
BUFFER_PREFIX = "buffer/"
FIRST_MOMENT_PREFIX = "adam_m/"
SECOND_MOMENT_PREFIX = "adam_v/"


def dump_checkpoint(ckpt: Checkpoint) -> bytes:
    """Serialize to SERM bytes; tensors are stored as float32."""
    tensors: Dict[str, np.ndarray] = dict(ckpt.parameters)
    for prefix, source in (
        (BUFFER_PREFIX, ckpt.buffers),
        (FIRST_MOMENT_PREFIX, ckpt.optimizer_state.first_moment),
        (SECOND_MOMENT_PREFIX, ckpt.optimizer_state.second_moment),
    ):
        tensors.update({f"{prefix}{name}": value for name, value in source.items()})
    header = {
        "kind": MODEL_KIND,
        "arch": ckpt.arch.model_dump(mode="json"),
        "optimizer_step": ckpt.optimizer_state.step,
        "rng_state": ckpt.rng_state,
        "metadata": ckpt.metadata,
    }
    return dump_model_container(header, tensors)


def parse_checkpoint(data: bytes) -> Checkpoint:
    header, tensors = load_model_container(data)
    if header.get("kind") != MODEL_KIND:
        raise ParseError(f"not a network checkpoint (kind {header.get('kind')!r})")

    def take(prefix: str) -> Dict[str, np.ndarray]:
        return {
            name.removeprefix(prefix): tensors.pop(name)
            for name in list(tensors)
            if name.startswith(prefix)
        }

    buffers = take(BUFFER_PREFIX)
    first_moment = take(FIRST_MOMENT_PREFIX)
    second_moment = take(SECOND_MOMENT_PREFIX)
    try:
        return Checkpoint(
            arch=ArchConfig.model_validate(header["arch"]),
            parameters=tensors,
            buffers=buffers,
            optimizer_state=AdamState(
                step=header.get("optimizer_step", 0),
                first_moment=first_moment,
                second_moment=second_moment,
            ),
            rng_state=header.get("rng_state", {}),
            metadata=header.get("metadata", {}),
        )
    except (KeyError, ValidationError) as e:
        raise ParseError(f"checkpoint does not match its architecture: {e}") from e


def save_checkpoint(ckpt: Checkpoint, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dump_checkpoint(ckpt))
    logger.info(f"Saved {ckpt.arch.name} checkpoint to {path}")


def load_checkpoint(path: Union[str, Path]) -> Checkpoint:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"checkpoint {path} not found")
    return parse_checkpoint(path.read_bytes())
