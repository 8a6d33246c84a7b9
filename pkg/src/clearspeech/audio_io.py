"""Multichannel WAV reading/writing with planar float buffers.

Disk format is interleaved RIFF/WAVE (PCM 16/24-bit or IEEE float32,
little-endian); in memory everything is planar float64 at nominal
full scale +-1.0.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MIN_SAMPLE_RATE = 16000


class WavError(Exception):
    """Base class for WAV I/O failures."""


class UnsupportedFormatError(WavError):
    """Codec or bit depth we do not handle."""


class TruncatedFileError(WavError):
    """Data chunk shorter than its declared size."""


@dataclass
class AudioBuffer:
    """Planar multichannel audio: samples has shape (channels, length)."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        self.samples = np.atleast_2d(np.asarray(self.samples, dtype=np.float64))
        if self.samples.ndim != 2 or self.samples.shape[0] < 1:
            raise ValueError("samples must be a (channels, length) array")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("samples contain NaN or Inf")
        if int(self.sample_rate) < MIN_SAMPLE_RATE:
            raise ValueError(f"sample_rate must be >= {MIN_SAMPLE_RATE}")
        self.sample_rate = int(self.sample_rate)

    @property
    def channels(self) -> int:
        return self.samples.shape[0]

    @property
    def length(self) -> int:
        return self.samples.shape[1]

    @property
    def duration(self) -> float:
        return self.length / self.sample_rate

    def copy(self) -> "AudioBuffer":
        return AudioBuffer(self.samples.copy(), self.sample_rate)


def _parse_chunks(raw: bytes):
    if len(raw) < 12 or raw[:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise UnsupportedFormatError("not a RIFF/WAVE file")
    pos = 12
    while pos + 8 <= len(raw):
        cid = raw[pos:pos + 4]
        (size,) = struct.unpack_from("<I", raw, pos + 4)
        yield cid, pos + 8, size
        pos += 8 + size + (size & 1)


def read_wav(path) -> AudioBuffer:
    """Read a PCM16/PCM24/float32 WAV file into an AudioBuffer."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    raw = path.read_bytes()

    fmt = None
    data_off = data_size = None
    for cid, off, size in _parse_chunks(raw):
        if cid == b"fmt " and fmt is None:
            if size < 16:
                raise UnsupportedFormatError("fmt chunk too small")
            fmt = struct.unpack_from("<HHIIHH", raw, off)
        elif cid == b"data" and data_off is None:
            data_off, data_size = off, size
    if fmt is None or data_off is None:
        raise UnsupportedFormatError("missing fmt or data chunk")

    audio_format, channels, sample_rate, _, block_align, bits = fmt
    if audio_format == 1 and bits in (16, 24):
        pass
    elif audio_format == 3 and bits == 32:
        pass
    else:
        raise UnsupportedFormatError(
            f"unsupported encoding: format tag {audio_format}, {bits}-bit")
    if channels < 1 or block_align != channels * (bits // 8):
        raise UnsupportedFormatError("inconsistent fmt chunk")

    if data_off + data_size > len(raw):
        raise TruncatedFileError(
            f"data chunk declares {data_size} bytes, file has "
            f"{len(raw) - data_off}")
    payload = raw[data_off:data_off + data_size]
    frame_bytes = block_align
    n_frames = len(payload) // frame_bytes
    payload = payload[:n_frames * frame_bytes]

    if audio_format == 3:
        x = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    elif bits == 16:
        x = np.frombuffer(payload, dtype="<i2").astype(np.float64) / 32768.0
    else:  # 24-bit: widen 3-byte little-endian to int32 with sign extension
        b = np.frombuffer(payload, dtype=np.uint8).reshape(-1, 3)
        x = (b[:, 0].astype(np.int32)
             | (b[:, 1].astype(np.int32) << 8)
             | (b[:, 2].astype(np.int8).astype(np.int32) << 16))
        x = x.astype(np.float64) / 8388608.0

    planar = x.reshape(n_frames, channels).T
    return AudioBuffer(planar, sample_rate)


def write_wav(buf: AudioBuffer, path, bit_depth="float32") -> None:
    """Write an AudioBuffer; bit_depth is 16, 24, or "float32".

    Integer depths clamp to [-1, 1 - 2^-(bits-1)] then round to nearest,
    ties away from zero. Never wraps.
    """
    if buf.length == 0:
        raise ValueError("refusing to write an empty buffer")
    interleaved = buf.samples.T  # (frames, channels)

    if bit_depth == "float32":
        payload = interleaved.astype("<f4").tobytes()
        audio_format, bits = 3, 32
    elif bit_depth in (16, 24):
        bits = bit_depth
        full = float(2 ** (bits - 1))
        x = np.clip(interleaved, -1.0, 1.0 - 1.0 / full)
        q = np.sign(x) * np.floor(np.abs(x) * full + 0.5)
        q = np.clip(q, -full, full - 1).astype(np.int32)
        if bits == 16:
            payload = q.astype("<i2").tobytes()
        else:
            b4 = q.astype("<i4").tobytes()
            payload = bytes(
                np.frombuffer(b4, dtype=np.uint8).reshape(-1, 4)[:, :3])
        audio_format = 1
    else:
        raise ValueError(f"bit_depth must be 16, 24, or 'float32': {bit_depth}")

    channels = buf.channels
    block_align = channels * (bits // 8)
    byte_rate = buf.sample_rate * block_align
    fmt = struct.pack("<HHIIHH", audio_format, channels, buf.sample_rate,
                      byte_rate, block_align, bits)
    body = (b"WAVE"
            + b"fmt " + struct.pack("<I", len(fmt)) + fmt
            + b"data" + struct.pack("<I", len(payload)) + payload)
    if len(payload) & 1:
        body += b"\x00"
    Path(path).write_bytes(b"RIFF" + struct.pack("<I", len(body)) + body)
