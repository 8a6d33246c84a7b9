import numpy as np
import pytest

from clearspeech.audio_io import AudioBuffer
from clearspeech.loudness import (SentinelLoudnessError, apply_gain_db,
                                  gain_to_match, integrated_loudness)


def stereo_sine(freq, duration_s, amplitude=1.0, fs=48000):
    t = np.arange(int(duration_s * fs)) / fs
    x = amplitude * np.sin(2 * np.pi * freq * t)
    return AudioBuffer(np.stack([x, x]), fs)


def test_silence_sentinel():
    res = integrated_loudness(AudioBuffer(np.zeros((2, 48000)), 48000))
    assert res.integrated is None
    assert res.sentinel == "silence"


def test_too_short_sentinel():
    res = integrated_loudness(AudioBuffer(np.ones((1, 1000)) * 0.1, 48000))
    assert res.sentinel == "too_short"


def test_997hz_reference_level():
    # full-scale 997 Hz in both channels: per-channel mean square 0.5 and
    # the standard K pre-filter's +0.691 dB at 997 Hz cancel the -0.691
    # offset, so the stereo reading sits at 0.0 LUFS (mono reads -3.01)
    res = integrated_loudness(stereo_sine(997, 10))
    assert res.integrated == pytest.approx(0.0, abs=0.1)
    mono = AudioBuffer(stereo_sine(997, 10).samples[:1], 48000)
    assert integrated_loudness(mono).integrated == pytest.approx(-3.01,
                                                                 abs=0.1)


def test_20db_scale_step():
    loud = integrated_loudness(stereo_sine(997, 10)).integrated
    quiet = integrated_loudness(stereo_sine(997, 10, amplitude=0.1)).integrated
    assert loud - quiet == pytest.approx(20.0, abs=1e-6)


def test_scale_covariance(rng):
    buf = AudioBuffer(0.1 * rng.standard_normal((2, 5 * 48000)), 48000)
    base = integrated_loudness(buf).integrated
    for g in (0.5, 2.0, 4.0):
        scaled = integrated_loudness(
            AudioBuffer(g * buf.samples, 48000)).integrated
        assert scaled - base == pytest.approx(20 * np.log10(g), abs=0.05)


def test_channel_symmetry(rng):
    samples = 0.2 * rng.standard_normal((2, 3 * 48000))
    a = integrated_loudness(AudioBuffer(samples, 48000))
    b = integrated_loudness(AudioBuffer(samples[::-1], 48000))
    assert a.integrated == b.integrated


def test_monotonicity(rng):
    buf = AudioBuffer(0.05 * rng.standard_normal((2, 3 * 48000)), 48000)
    prev = -np.inf
    for g in (1.0, 1.5, 2.0, 4.0, 8.0):
        cur = integrated_loudness(AudioBuffer(g * buf.samples, 48000)).integrated
        assert cur >= prev
        prev = cur


def test_integrated_within_block_range(rng):
    buf = AudioBuffer(0.2 * rng.standard_normal((2, 5 * 48000)), 48000)
    res = integrated_loudness(buf)
    finite = res.block_loudness[np.isfinite(res.block_loudness)]
    assert finite.min() <= res.integrated <= finite.max()


def test_three_channels_rejected():
    with pytest.raises(ValueError):
        integrated_loudness(AudioBuffer(np.zeros((3, 48000)), 48000))


def test_gain_to_match():
    assert gain_to_match(-23.0, -23.0) == 0.0
    assert gain_to_match(-26.0, -23.0) == 3.0
    with pytest.raises(SentinelLoudnessError):
        gain_to_match(None, -23.0)


def test_measure_apply_remeasure(rng):
    buf = AudioBuffer(0.1 * rng.standard_normal((2, 5 * 48000)), 48000)
    measured = integrated_loudness(buf).integrated
    gain = gain_to_match(measured, -23.0)
    redone = integrated_loudness(apply_gain_db(buf, gain)).integrated
    assert redone == pytest.approx(-23.0, abs=0.1)
