"""Desk-scale supervised training of the mask model.

Plain gradient descent (optional momentum) on the magnitude regression
loss mean((mask * |mix|) - |dialogue|)^2, with patches cut from item
spectrograms. Deterministic given the seed; patch gradients are reduced
in a fixed order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .masknet import MaskModel
from .spectral import StftConfig, stft


class TrainingDivergedError(RuntimeError):
    def __init__(self, epoch, last_finite_loss):
        super().__init__(
            f"loss became non-finite at epoch {epoch}; "
            f"last finite loss {last_finite_loss}")
        self.epoch = epoch
        self.last_finite_loss = last_finite_loss


@dataclass
class TrainConfig:
    epochs: int = 50
    learning_rate: float = 0.2
    momentum: float = 0.9
    patch_frames: int = 32
    patch_bins: int = 256
    patches_per_item: int = 2
    seed: int = 0
    stft: StftConfig = StftConfig()

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


def prepare_patches(dataset, cfg: TrainConfig):
    """Cut (features, |mix|, |dialogue|) patches from every dataset item."""
    rng = np.random.default_rng(cfg.seed)
    patches = []
    for mix, dialogue, _ in dataset:
        mix_spec = stft(mix, cfg.stft)
        d_spec = stft(dialogue, cfg.stft)
        mag_mix = np.abs(mix_spec.data)        # (C, T, F)
        mag_d = np.abs(d_spec.data)
        frames, bins = mag_mix.shape[1], mag_mix.shape[2]
        pt = min(cfg.patch_frames, frames)
        pf = min(cfg.patch_bins, bins)
        for _ in range(cfg.patches_per_item):
            t0 = rng.integers(0, frames - pt + 1)
            f0 = rng.integers(0, bins - pf + 1)
            patches.append((mag_mix[:, t0:t0 + pt, f0:f0 + pf],
                            mag_d[:, t0:t0 + pt, f0:f0 + pf]))
    return patches


def patch_loss_and_grads(model: MaskModel, mag_mix, mag_d):
    """MSE of masked mix magnitude vs dialogue magnitude, plus gradients.

    The MSE is normalized by the patch's mix energy so loud and quiet
    patches contribute comparably and one step size fits all material.
    """
    features = model.features(mag_mix)
    mask, cache = model.forward(features, keep_cache=True)
    err = mask[None, :, :] * mag_mix - mag_d    # (C, T, F)
    denom = float(np.mean(mag_mix ** 2)) + 1e-12
    loss = float(np.mean(err ** 2)) / denom
    grad_mask = np.sum(2.0 * err * mag_mix, axis=0) / (err.size * denom)
    grad_w, grad_b = model.backward(cache, grad_mask)
    return loss, grad_w, grad_b


def train_desk(model: MaskModel, dataset, epochs: int = None,
               learning_rate: float = None,
               cfg: TrainConfig = None, progress=None):
    """Train in place; returns the per-epoch mean loss history."""
    if not dataset:
        raise ValueError("empty dataset")
    cfg = cfg or TrainConfig()
    epochs = cfg.epochs if epochs is None else epochs
    lr = cfg.learning_rate if learning_rate is None else learning_rate
    if epochs < 1:
        raise ValueError("epochs must be >= 1")

    patches = prepare_patches(dataset, cfg)
    vel_w = [np.zeros_like(w) for w in model.weights]
    vel_b = [np.zeros_like(b) for b in model.biases]
    history = []
    last_finite = None
    for epoch in range(epochs):
        total = 0.0
        acc_w = [np.zeros_like(w) for w in model.weights]
        acc_b = [np.zeros_like(b) for b in model.biases]
        for mag_mix, mag_d in patches:   # fixed order for reproducibility
            loss, gw, gb = patch_loss_and_grads(model, mag_mix, mag_d)
            total += loss
            for i in range(len(acc_w)):
                acc_w[i] += gw[i]
                acc_b[i] += gb[i]
        mean_loss = total / len(patches)
        if not np.isfinite(mean_loss):
            raise TrainingDivergedError(epoch, last_finite)
        last_finite = mean_loss
        history.append(mean_loss)
        if progress:
            progress(epoch, mean_loss)
        for i in range(len(model.weights)):
            vel_w[i] = cfg.momentum * vel_w[i] - lr * acc_w[i] / len(patches)
            vel_b[i] = cfg.momentum * vel_b[i] - lr * acc_b[i] / len(patches)
            model.weights[i] += vel_w[i]
            model.biases[i] += vel_b[i]
        if not all(np.all(np.isfinite(w)) for w in model.weights):
            raise TrainingDivergedError(epoch, last_finite)
    return history
