import logging
import struct
from pathlib import Path
from typing import Literal, Union

import numpy as np

from wav2emo.audio.entities import CANONICAL_RATE, Waveform
from wav2emo.errors import ConfigError, ParseError, UnsupportedFormat

logger = logging.getLogger(__name__)

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_IEEE_FLOAT = 0x0003
WAVE_FORMAT_EXTENSIBLE = 0xFFFE

PCM16_SCALE = 32768.0


def _read_chunks(data: bytes) -> dict[bytes, bytes]:
    """
    Walk the RIFF chunk list of a WAVE file.

    Args:
        data: Complete file contents.

    Returns:
        Mapping of chunk id to chunk payload; the first occurrence of an id wins.
    """
    if len(data) < 12:
        raise ParseError(f"file too short for a RIFF header ({len(data)} bytes)")
    riff, _, wave = struct.unpack_from("<4sI4s", data, 0)
    if riff != b"RIFF" or wave != b"WAVE":
        raise ParseError("missing RIFF/WAVE signature")

    chunks: dict[bytes, bytes] = {}
    offset = 12
    while offset + 8 <= len(data):
        chunk_id, size = struct.unpack_from("<4sI", data, offset)
        body = data[offset + 8 : offset + 8 + size]
        if len(body) < size and chunk_id != b"data":
            raise ParseError(f"chunk {chunk_id!r} truncated")
        chunks.setdefault(chunk_id, body)
        # chunks are word aligned
        offset += 8 + size + (size & 1)
    return chunks


def parse_wav(data: bytes) -> Waveform:
    """
    Decode a PCM16 or float32 WAVE file into a mono Waveform.

    Stereo is averaged down to mono; 16-bit samples are scaled by 1/32768.
    """
    chunks = _read_chunks(data)
    if b"fmt " not in chunks:
        raise ParseError("missing fmt chunk")
    if b"data" not in chunks:
        raise ParseError("missing data chunk")

    fmt = chunks[b"fmt "]
    if len(fmt) < 16:
        raise ParseError(f"fmt chunk too short ({len(fmt)} bytes)")
    codec, channels, sample_rate, _, block_align, bits = struct.unpack_from(
        "<HHIIHH", fmt, 0
    )
    if codec == WAVE_FORMAT_EXTENSIBLE:
        if len(fmt) < 26:
            raise ParseError("extensible fmt chunk too short")
        # the sub-format GUID starts with the plain format tag
        (codec,) = struct.unpack_from("<H", fmt, 24)

    if channels not in (1, 2):
        raise UnsupportedFormat(f"{channels} channels (only mono and stereo)")
    if sample_rate <= 0:
        raise ParseError("sample rate must be positive")
    if codec == WAVE_FORMAT_PCM and bits == 16:
        dtype = np.dtype("<i2")
    elif codec == WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        dtype = np.dtype("<f4")
    else:
        raise UnsupportedFormat(f"codec {codec:#06x} with {bits} bits per sample")
    if block_align != channels * dtype.itemsize:
        raise ParseError(f"block align {block_align} inconsistent with format")

    payload = chunks[b"data"]
    n_frames = len(payload) // block_align
    if n_frames == 0:
        raise ParseError("data chunk holds no samples")
    samples = np.frombuffer(payload[: n_frames * block_align], dtype=dtype)
    samples = samples.astype(np.float64).reshape(n_frames, channels).mean(axis=1)
    if dtype.kind == "i":
        samples /= PCM16_SCALE
    return Waveform(samples=samples, sample_rate=sample_rate)


def write_wav(w: Waveform, codec: Literal["pcm16", "float32"] = "pcm16") -> bytes:
    if codec == "pcm16":
        ints = np.clip(np.round(w.samples * PCM16_SCALE), -32768, 32767)
        payload = ints.astype("<i2").tobytes()
        format_tag, bits = WAVE_FORMAT_PCM, 16
    elif codec == "float32":
        payload = w.samples.astype("<f4").tobytes()
        format_tag, bits = WAVE_FORMAT_IEEE_FLOAT, 32
    else:
        raise UnsupportedFormat(f"cannot write codec {codec!r}")

    block_align = bits // 8
    fmt = struct.pack(
        "<HHIIHH",
        format_tag,
        1,
        w.sample_rate,
        w.sample_rate * block_align,
        block_align,
        bits,
    )
    body = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt
    body += b"data" + struct.pack("<I", len(payload)) + payload
    if len(payload) & 1:
        body += b"\x00"
    return b"RIFF" + struct.pack("<I", len(body)) + body


def resample_linear(w: Waveform, target_rate: int) -> Waveform:
    """
    Resample by linear interpolation between neighboring samples.

    Output positions past the last input sample repeat the last sample.
    """
    if target_rate <= 0:
        raise ConfigError(f"target rate must be positive, got {target_rate}")
    if target_rate == w.sample_rate:
        return w
    n_out = max(1, round(w.samples.size * target_rate / w.sample_rate))
    positions = np.arange(n_out) * (w.sample_rate / target_rate)
    samples = np.interp(positions, np.arange(w.samples.size), w.samples)
    return Waveform(samples=samples, sample_rate=target_rate)


def load_waveform(
    path: Union[str, Path], target_rate: int = CANONICAL_RATE
) -> Waveform:
    data = Path(path).read_bytes()
    try:
        waveform = parse_wav(data)
    except (ParseError, UnsupportedFormat) as e:
        raise type(e)(f"{path}: {e}") from e
    if waveform.sample_rate != target_rate:
        logger.debug(f"Resampling {path} from {waveform.sample_rate} Hz")
    return resample_linear(waveform, target_rate)
