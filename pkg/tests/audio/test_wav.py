import struct

import numpy as np
import pytest

from wav2emo.audio import Waveform, load_waveform, parse_wav, resample_linear, write_wav
from wav2emo.errors import ConfigError, ParseError, UnsupportedFormat


def _wav_bytes(
    payload: bytes, channels: int = 1, rate: int = 16000, tag: int = 1, bits: int = 16
) -> bytes:
    align = channels * bits // 8
    fmt = struct.pack("<HHIIHH", tag, channels, rate, rate * align, align, bits)
    body = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt
    body += b"data" + struct.pack("<I", len(payload)) + payload
    return b"RIFF" + struct.pack("<I", len(body)) + body


@pytest.fixture
def tone() -> Waveform:
    t = np.arange(16000) / 16000
    return Waveform(samples=0.5 * np.sin(2 * np.pi * 440 * t), sample_rate=16000)


def test_zero_signal() -> None:
    w = parse_wav(_wav_bytes(bytes(2 * 16000)))
    assert w.sample_rate == 16000
    assert len(w) == 16000
    assert np.all(w.samples == 0.0)


def test_stereo_is_averaged() -> None:
    frame = struct.pack("<hh", 16384, -16384)
    w = parse_wav(_wav_bytes(frame * 100, channels=2))
    assert len(w) == 100
    assert np.all(w.samples == 0.0)


def test_pcm16_round_trip(tone: Waveform) -> None:
    w = parse_wav(write_wav(tone))
    assert abs(np.max(np.abs(w.samples)) - 0.5) <= 1 / 32768
    assert np.max(np.abs(w.samples - tone.samples)) <= 1 / 32768


def test_float32_round_trip(tone: Waveform) -> None:
    w = parse_wav(write_wav(tone, codec="float32"))
    assert np.allclose(w.samples, tone.samples, atol=1e-7)


def test_pcm16_clips_out_of_range() -> None:
    loud = Waveform(samples=np.array([2.0, -2.0, 1.0]), sample_rate=8000)
    w = parse_wav(write_wav(loud))
    assert w.samples.tolist() == [32767 / 32768, -1.0, 32767 / 32768]


def test_bad_signature() -> None:
    data = _wav_bytes(bytes(4))
    with pytest.raises(ParseError):
        parse_wav(b"RIFX" + data[4:])
    with pytest.raises(ParseError):
        parse_wav(data[:10])


def test_unsupported_codec() -> None:
    with pytest.raises(UnsupportedFormat):
        parse_wav(_wav_bytes(bytes(6), bits=24))
    with pytest.raises(UnsupportedFormat):
        parse_wav(_wav_bytes(bytes(12), channels=3))


def test_missing_data_chunk() -> None:
    data = _wav_bytes(bytes(4))
    with pytest.raises(ParseError):
        parse_wav(data[: 12 + 8 + 16])


def test_resample_identity(tone: Waveform) -> None:
    assert resample_linear(tone, 16000) is tone


def test_resample_constant() -> None:
    w = Waveform(samples=np.full(441, 0.25), sample_rate=44100)
    out = resample_linear(w, 16000)
    assert out.sample_rate == 16000
    assert len(out) == round(441 * 16000 / 44100)
    assert np.allclose(out.samples, 0.25)


def test_resample_ramp_midpoints() -> None:
    ramp = Waveform(samples=np.arange(8000, dtype=float), sample_rate=8000)
    out = resample_linear(ramp, 16000)
    assert len(out) == 16000
    assert np.array_equal(out.samples[0:-2:2], ramp.samples[:-1])
    midpoints = (ramp.samples[:-1] + ramp.samples[1:]) / 2
    assert np.array_equal(out.samples[1:-2:2], midpoints)


def test_resample_rejects_bad_rate(tone: Waveform) -> None:
    for rate in (0, -8000):
        with pytest.raises(ConfigError, match="target rate"):
            resample_linear(tone, rate)


def test_load_waveform_resamples(tmp_path, tone: Waveform) -> None:
    low = resample_linear(tone, 8000)
    path = tmp_path / "tone.wav"
    path.write_bytes(write_wav(low))
    w = load_waveform(path)
    assert w.sample_rate == 16000
    assert len(w) == 16000


def test_load_waveform_names_the_file(tmp_path) -> None:
    path = tmp_path / "broken.wav"
    path.write_bytes(b"not a wave file")
    with pytest.raises(ParseError, match="broken.wav"):
        load_waveform(path)
