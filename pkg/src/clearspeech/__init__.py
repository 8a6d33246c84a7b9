"""Dialogue enhancement for broadcast mixes.

Separates dialogue from background in final stereo mixes, applies a
mixture-preserving speech-band boost, renders loudness-preserving
remixes with dialogue-gated background ducking, and packages the result
as an enhanced stereo track plus an object-style stem package.
"""

from .audio_io import AudioBuffer, read_wav, write_wav
from .delivery import (AdmDocument, GainBounds, export_package, parse_package,
                       render_enhanced_track)
from .loudness import LoudnessResult, gain_to_match, integrated_loudness
from .masknet import MaskModel, MaskModelConfig, count_parameters, default_config
from .remix import (ActivityTrack, Preset, RemixParams, detect_activity,
                    ducking_gain_curve, find_preset, preset_registry, remix)
from .separation import (StemPair, apply_mask_consistent, infer_mask,
                         separate_center, separate_model, speech_boost)
from .spectral import Spectrogram, StftConfig, istft, stft
from .synthdata import SynthDatasetConfig, synth_dataset
from .training import TrainConfig, train_desk

__version__ = "0.1.0"
