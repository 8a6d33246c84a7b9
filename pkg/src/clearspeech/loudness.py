"""K-weighted gated program loudness (BS.1770-style subset) and gain solving.

Integrated loudness with the two-stage gate plus 400 ms momentary blocks.
Filter coefficients are re-derived from the analog prototypes for the
buffer's sample rate, so non-48k material measures correctly too.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.signal

from .audio_io import AudioBuffer

ABSOLUTE_GATE_LUFS = -70.0
RELATIVE_GATE_LU = -10.0
BLOCK_S = 0.400
BLOCK_OVERLAP = 0.75
_OFFSET = -0.691


class SentinelLoudnessError(ValueError):
    """Raised when a sentinel (silence / too short) reaches gain math."""


@dataclass
class LoudnessResult:
    integrated: float | None      # LUFS, or None with a reason below
    sentinel: str | None          # "silence" | "too_short" | None
    block_loudness: np.ndarray    # per-block LUFS (-inf for silent blocks)
    block_times: np.ndarray       # block start times in seconds

    @property
    def is_silence(self) -> bool:
        return self.sentinel == "silence"


def k_weighting_coefficients(fs: int):
    """High-shelf + high-pass biquad pairs for sample rate fs.

    Bilinear re-derivation of the standard pre-filters (analog prototype
    constants from De Man's sample-rate-independent formulation).
    """
    # stage 1: ~+4 dB high shelf
    f0, G, Q = 1681.9744509555319, 3.99984385397, 0.7071752369554193
    K = np.tan(np.pi * f0 / fs)
    Vh = 10.0 ** (G / 20.0)
    Vb = Vh ** 0.499666774155
    a0 = 1.0 + K / Q + K * K
    shelf_b = np.array([(Vh + Vb * K / Q + K * K) / a0,
                        2.0 * (K * K - Vh) / a0,
                        (Vh - Vb * K / Q + K * K) / a0])
    shelf_a = np.array([1.0,
                        2.0 * (K * K - 1.0) / a0,
                        (1.0 - K / Q + K * K) / a0])
    # stage 2: ~38 Hz high-pass
    f0, Q = 38.13547087613982, 0.5003270373253953
    K = np.tan(np.pi * f0 / fs)
    a0 = 1.0 + K / Q + K * K
    hp_b = np.array([1.0, -2.0, 1.0])
    hp_a = np.array([1.0,
                     2.0 * (K * K - 1.0) / a0,
                     (1.0 - K / Q + K * K) / a0])
    return (shelf_b, shelf_a), (hp_b, hp_a)


def _k_weight(x: np.ndarray, fs: int) -> np.ndarray:
    (sb, sa), (hb, ha) = k_weighting_coefficients(fs)
    return scipy.signal.lfilter(hb, ha, scipy.signal.lfilter(sb, sa, x))


def integrated_loudness(buf: AudioBuffer) -> LoudnessResult:
    """Integrated loudness with absolute (-70 LUFS) and relative (-10 LU) gates."""
    if buf.channels > 2:
        raise ValueError("only mono and stereo supported")
    fs = buf.sample_rate
    block = int(round(BLOCK_S * fs))
    step = int(round(block * (1.0 - BLOCK_OVERLAP)))
    if buf.length < block:
        return LoudnessResult(None, "too_short", np.empty(0), np.empty(0))

    weighted = np.stack([_k_weight(ch, fs) for ch in buf.samples])
    n_blocks = 1 + (buf.length - block) // step
    starts = step * np.arange(n_blocks)
    idx = starts[:, None] + np.arange(block)[None, :]
    # per-block energy summed over channels
    energy = np.zeros(n_blocks)
    for ch in range(buf.channels):
        energy += np.mean(weighted[ch][idx] ** 2, axis=1)

    with np.errstate(divide="ignore"):
        block_lufs = _OFFSET + 10.0 * np.log10(energy)
    times = starts / fs

    above_abs = block_lufs > ABSOLUTE_GATE_LUFS
    if not np.any(above_abs):
        return LoudnessResult(None, "silence", block_lufs, times)
    ref = _OFFSET + 10.0 * np.log10(np.mean(energy[above_abs]))
    keep = above_abs & (block_lufs > ref + RELATIVE_GATE_LU)
    if not np.any(keep):
        return LoudnessResult(None, "silence", block_lufs, times)
    integrated = _OFFSET + 10.0 * np.log10(np.mean(energy[keep]))
    return LoudnessResult(float(integrated), None, block_lufs, times)


def gain_to_match(measured: float | None, target: float | None) -> float:
    """Gain in dB taking a signal at `measured` LUFS to `target` LUFS."""
    if measured is None or target is None:
        raise SentinelLoudnessError("loudness sentinel has no matching gain")
    return float(target) - float(measured)


def apply_gain_db(buf: AudioBuffer, gain_db: float) -> AudioBuffer:
    return AudioBuffer(buf.samples * 10.0 ** (gain_db / 20.0), buf.sample_rate)
