"""Small fully-convolutional time-frequency mask estimator, pure numpy.

Same-padded 2D convolutions over (time, frequency) with an explicit
backward pass, so gradients can be checked against finite differences.
The default layout lands near 370k parameters.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np
import scipy.special

CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class LayerSpec:
    in_ch: int
    out_ch: int
    kernel_t: int
    kernel_f: int
    activation: str  # "relu" | "sigmoid"


@dataclass(frozen=True)
class MaskModelConfig:
    layers: tuple
    log_compress_input: bool = True

    def __post_init__(self):
        if not self.layers:
            raise ValueError("need at least one layer")
        for a, b in zip(self.layers, self.layers[1:]):
            if a.out_ch != b.in_ch:
                raise ValueError("layer channel counts do not chain")
        if self.layers[-1].activation != "sigmoid":
            raise ValueError("last layer must be sigmoid to bound the mask")
        for layer in self.layers:
            if layer.activation not in ("relu", "sigmoid"):
                raise ValueError(f"unknown activation: {layer.activation}")


def default_config() -> MaskModelConfig:
    """Stereo magnitude in, one mask channel out; ~362k parameters."""
    return MaskModelConfig(layers=(
        LayerSpec(2, 48, 5, 5, "relu"),
        LayerSpec(48, 64, 5, 5, "relu"),
        LayerSpec(64, 64, 5, 5, "relu"),
        LayerSpec(64, 64, 5, 5, "relu"),
        LayerSpec(64, 48, 5, 5, "relu"),
        LayerSpec(48, 1, 5, 5, "sigmoid"),
    ))


def compact_config() -> MaskModelConfig:
    """Small 3-layer variant that trains in seconds on a laptop CPU."""
    return MaskModelConfig(layers=(
        LayerSpec(2, 16, 3, 5, "relu"),
        LayerSpec(16, 16, 3, 5, "relu"),
        LayerSpec(16, 1, 3, 5, "sigmoid"),
    ))


def count_parameters(cfg: MaskModelConfig) -> int:
    return sum((l.kernel_t * l.kernel_f * l.in_ch + 1) * l.out_ch
               for l in cfg.layers)


def _im2col(x: np.ndarray, kt: int, kf: int) -> np.ndarray:
    """(C, T, F) -> (T*F, C*kt*kf) patch matrix with same-padding."""
    c, t, f = x.shape
    pt, pf = kt // 2, kf // 2
    padded = np.zeros((c, t + kt - 1, f + kf - 1), dtype=x.dtype)
    padded[:, pt:pt + t, pf:pf + f] = x
    windows = np.lib.stride_tricks.sliding_window_view(
        padded, (kt, kf), axis=(1, 2))       # (C, T, F, kt, kf)
    return windows.transpose(1, 2, 0, 3, 4).reshape(t * f, c * kt * kf)


def _col2im(cols: np.ndarray, shape, kt: int, kf: int) -> np.ndarray:
    """Adjoint of _im2col: scatter patch-gradients back to (C, T, F)."""
    c, t, f = shape
    pt, pf = kt // 2, kf // 2
    acc = np.zeros((c, t + kt - 1, f + kf - 1), dtype=cols.dtype)
    g = cols.reshape(t, f, c, kt, kf)
    for dt in range(kt):
        for df in range(kf):
            acc[:, dt:dt + t, df:df + f] += g[:, :, :, dt, df].transpose(2, 0, 1)
    return acc[:, pt:pt + t, pf:pf + f]


class MaskModel:
    """Parameter container + forward/backward over the conv stack."""

    def __init__(self, cfg: MaskModelConfig, rng=None, dtype=np.float64):
        self.cfg = cfg
        self.dtype = np.dtype(dtype)
        rng = rng or np.random.default_rng(0)
        self.weights = []
        self.biases = []
        for l in cfg.layers:
            fan_in = l.kernel_t * l.kernel_f * l.in_ch
            w = rng.normal(0.0, np.sqrt(2.0 / fan_in),
                           size=(l.out_ch, l.in_ch, l.kernel_t, l.kernel_f))
            self.weights.append(w.astype(self.dtype))
            self.biases.append(np.zeros(l.out_ch, dtype=self.dtype))

    def parameter_count(self) -> int:
        return count_parameters(self.cfg)

    def features(self, magnitudes: np.ndarray) -> np.ndarray:
        """Input feature map from per-channel magnitudes (C, T, F).

        Magnitudes are normalized by their RMS so the features do not
        depend on the program level, then optionally log-compressed.
        """
        x = np.asarray(magnitudes, dtype=self.dtype)
        rms = np.sqrt(np.mean(x ** 2))
        if rms > 0:
            x = x / rms
        if self.cfg.log_compress_input:
            x = np.log1p(x)
        return x

    def forward(self, x: np.ndarray, keep_cache: bool = False):
        """(C, T, F) features -> (T, F) mask in [0, 1]."""
        if x.ndim != 3 or x.shape[0] != self.cfg.layers[0].in_ch:
            raise ValueError(
                f"expected {self.cfg.layers[0].in_ch} input channels, "
                f"got shape {x.shape}")
        cache = []
        h = x.astype(self.dtype)
        for l, w, b in zip(self.cfg.layers, self.weights, self.biases):
            t, f = h.shape[1], h.shape[2]
            cols = _im2col(h, l.kernel_t, l.kernel_f)
            z = cols @ w.reshape(l.out_ch, -1).T + b      # (T*F, out)
            z = z.T.reshape(l.out_ch, t, f)
            if l.activation == "relu":
                a = np.maximum(z, 0.0)
            else:
                a = scipy.special.expit(z)
            cache.append((h.shape, cols, z, a))
            h = a
        mask = h[0]
        if keep_cache:
            return mask, cache
        return mask

    def backward(self, cache, grad_mask: np.ndarray):
        """Gradients of a scalar loss w.r.t. all weights and biases."""
        grad_w = [None] * len(self.weights)
        grad_b = [None] * len(self.biases)
        g = grad_mask[None, :, :].astype(self.dtype)
        for i in range(len(self.cfg.layers) - 1, -1, -1):
            l = self.cfg.layers[i]
            in_shape, cols, z, a = cache[i]
            if l.activation == "relu":
                gz = g * (z > 0.0)
            else:
                gz = g * a * (1.0 - a)
            gz_flat = gz.reshape(l.out_ch, -1)            # (out, T*F)
            grad_w[i] = (gz_flat @ cols).reshape(self.weights[i].shape)
            grad_b[i] = gz_flat.sum(axis=1)
            if i > 0:
                gcols = gz_flat.T @ self.weights[i].reshape(l.out_ch, -1)
                g = _col2im(gcols, in_shape, l.kernel_t, l.kernel_f)
        return grad_w, grad_b

    def save(self, path) -> None:
        """Versioned npz checkpoint: config JSON + per-layer float arrays."""
        payload = {
            "version": np.array([CHECKPOINT_VERSION]),
            "config_json": np.frombuffer(json.dumps({
                "log_compress_input": self.cfg.log_compress_input,
                "layers": [[l.in_ch, l.out_ch, l.kernel_t, l.kernel_f,
                            l.activation] for l in self.cfg.layers],
            }).encode(), dtype=np.uint8),
        }
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            payload[f"w{i}"] = w
            payload[f"b{i}"] = b
        with open(path, "wb") as fh:
            np.savez(fh, **payload)

    @classmethod
    def load(cls, path) -> "MaskModel":
        with np.load(path) as z:
            version = int(z["version"][0])
            if version != CHECKPOINT_VERSION:
                raise ValueError(f"unsupported checkpoint version {version}")
            meta = json.loads(bytes(z["config_json"]).decode())
            cfg = MaskModelConfig(
                layers=tuple(LayerSpec(*spec) for spec in meta["layers"]),
                log_compress_input=meta["log_compress_input"])
            model = cls(cfg, dtype=z["w0"].dtype)
            model.weights = [z[f"w{i}"].copy() for i in range(len(cfg.layers))]
            model.biases = [z[f"b{i}"].copy() for i in range(len(cfg.layers))]
        return model
