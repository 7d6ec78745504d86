"""Shared fixtures: WAV file crafting and common tones."""
from __future__ import annotations

import struct

import numpy as np
import pytest

from yingram import AnalysisConfig, Waveform


def _riff(fmt_body: bytes, data: bytes, extra_chunks: bytes = b"") -> bytes:
    chunks = b"fmt " + struct.pack("<I", len(fmt_body)) + fmt_body
    chunks += extra_chunks
    chunks += b"data" + struct.pack("<I", len(data)) + data
    return b"RIFF" + struct.pack("<I", 4 + len(chunks)) + b"WAVE" + chunks


def _fmt(tag: int, channels: int, sr: int, bits: int) -> bytes:
    block = channels * bits // 8
    return struct.pack("<HHIIHH", tag, channels, sr, sr * block, block, bits)


def write_pcm16(path, values: np.ndarray, sr: int = 22050, channels: int = 1) -> None:
    data = np.asarray(values, dtype="<i2").tobytes()
    path.write_bytes(_riff(_fmt(1, channels, sr, 16), data))


def write_pcm24(path, values: np.ndarray, sr: int = 22050) -> None:
    out = bytearray()
    for v in np.asarray(values, dtype=np.int32):
        out += int(v & 0xFFFFFF).to_bytes(3, "little")
    path.write_bytes(_riff(_fmt(1, 1, sr, 24), bytes(out)))


def write_float32(path, samples: np.ndarray, sr: int = 22050) -> None:
    data = np.asarray(samples, dtype="<f4").tobytes()
    path.write_bytes(_riff(_fmt(3, 1, sr, 32), data))


def write_wav(path, w: Waveform) -> None:
    """Float32 WAV of a Waveform; lossless enough for analysis tests."""
    write_float32(path, w.samples, w.sample_rate)


def write_mulaw(path, sr: int = 8000) -> None:
    path.write_bytes(_riff(_fmt(7, 1, sr, 8), b"\x00" * 64))


def write_extensible_pcm16(path, values: np.ndarray, sr: int = 22050) -> None:
    """WAVE_FORMAT_EXTENSIBLE wrapper around plain PCM16."""
    base = _fmt(0xFFFE, 1, sr, 16)
    sub_format = struct.pack("<H", 1) + b"\x00" * 14  # PCM GUID prefix
    ext = struct.pack("<HHI", 22, 16, 1) + sub_format
    data = np.asarray(values, dtype="<i2").tobytes()
    path.write_bytes(_riff(base + ext, data))


def write_pcm32_int(path, sr: int = 22050) -> None:
    data = np.zeros(8, dtype="<i4").tobytes()
    path.write_bytes(_riff(_fmt(1, 1, sr, 32), data))


def write_with_extra_chunk(path, values: np.ndarray, sr: int = 22050) -> None:
    """A LIST chunk between fmt and data; readers must skip it."""
    extra = b"LIST" + struct.pack("<I", 5) + b"INFOx" + b"\x00"  # odd size, padded
    data = np.asarray(values, dtype="<i2").tobytes()
    path.write_bytes(_riff(_fmt(1, 1, sr, 16), data, extra_chunks=extra))


def write_truncated(path, sr: int = 22050) -> None:
    # data chunk claims 1000 bytes but carries 10
    body = _fmt(1, 1, sr, 16)
    blob = b"RIFF" + struct.pack("<I", 4 + 8 + len(body) + 8 + 10) + b"WAVE"
    blob += b"fmt " + struct.pack("<I", len(body)) + body
    blob += b"data" + struct.pack("<I", 1000) + b"\x00" * 10
    path.write_bytes(blob)


@pytest.fixture
def cfg() -> AnalysisConfig:
    return AnalysisConfig()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0)
