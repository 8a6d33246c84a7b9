import numpy as np
import pytest

from clearspeech.audio_io import AudioBuffer


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def sine(freq, duration_s, fs=48000, amplitude=1.0, channels=2):
    t = np.arange(int(duration_s * fs)) / fs
    x = amplitude * np.sin(2 * np.pi * freq * t)
    return AudioBuffer(np.tile(x, (channels, 1)), fs)


def noise_buffer(rng, duration_s, fs=48000, amplitude=0.3, channels=2):
    n = int(duration_s * fs)
    return AudioBuffer(amplitude * rng.standard_normal((channels, n)), fs)


@pytest.fixture
def speech_music_item():
    """One synthetic speech-over-music mix with known stems."""
    from clearspeech.synthdata import SynthDatasetConfig, synth_dataset
    items = synth_dataset(SynthDatasetConfig(
        count=1, duration_s=3.0, seed=7, snr_range_db=(3.0, 3.0)))
    return items[0]
