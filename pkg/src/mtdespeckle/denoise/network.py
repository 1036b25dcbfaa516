"""Small residual convolutional denoiser for log-intensity images.

The network maps a rescaled log-image ``xs = (y - m) / (M - m)`` to a noise
estimate ``g(xs)`` and returns ``y - (M - m) * g(xs)``, i.e. the residual
``xs - g(xs)`` mapped back to log units. Layers are 'same' convolutions with
edge-replication padding, tanh between layers, no activation on the last.

Forward and backward passes are plain numpy so parameter gradients can be
checked against finite differences.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import (
    BadMagicError,
    ConfigurationError,
    DimensionError,
    TruncatedError,
    UnsupportedVersionError,
)

MODEL_MAGIC = b"RDNM"
MODEL_VERSION = 1
_HEADER = struct.Struct("<4sIIII3d")


@dataclass(frozen=True)
class AffineRange:
    """Log-intensity extrema ``m`` (low) and ``M`` (high) of a training corpus."""

    low: float
    high: float

    def __post_init__(self):
        if not self.high > self.low:
            raise ConfigurationError(f"degenerate affine range [{self.low}, {self.high}]")

    @property
    def span(self) -> float:
        return self.high - self.low


def rescale(y: np.ndarray, r: AffineRange) -> np.ndarray:
    """Map log-intensities to roughly [0, 1]; values outside are kept."""
    return (np.asarray(y, dtype=np.float64) - r.low) / r.span


def unrescale(ys: np.ndarray, r: AffineRange) -> np.ndarray:
    return np.asarray(ys, dtype=np.float64) * r.span + r.low


# -- convolution primitives --------------------------------------------------

def _pad_edge(x, p):
    if p == 0:
        return x
    return np.pad(x, ((0, 0), (0, 0), (p, p), (p, p)), mode="edge")


def _fold_edge(g, p):
    """Adjoint of :func:`_pad_edge`."""
    if p == 0:
        return g
    g = g.copy()
    for axis in (2, 3):
        g = np.moveaxis(g, axis, 0)
        g[p] += g[:p].sum(axis=0)
        g[-p - 1] += g[-p:].sum(axis=0)
        g = np.moveaxis(g[p:-p], 0, axis)
    return g


def _correlate_valid(xp, w):
    """(B, Cin, H+k-1, W+k-1) x (Cout, Cin, k, k) -> (B, Cout, H, W)."""
    k = w.shape[-1]
    win = sliding_window_view(xp, (k, k), axis=(2, 3))
    out = np.tensordot(win, w, axes=([1, 4, 5], [1, 2, 3]))
    return np.ascontiguousarray(out.transpose(0, 3, 1, 2))


def conv_forward(x, w, b):
    p = w.shape[-1] // 2
    xp = _pad_edge(x, p)
    return _correlate_valid(xp, w) + b[None, :, None, None], xp


def conv_backward(dout, xp, w):
    k = w.shape[-1]
    p = k // 2
    win = sliding_window_view(xp, (k, k), axis=(2, 3))
    dw = np.tensordot(dout, win, axes=([0, 2, 3], [0, 2, 3]))
    db = dout.sum(axis=(0, 2, 3))
    q = k - 1
    dpad = np.pad(dout, ((0, 0), (0, 0), (q, q), (q, q)))
    wflip = w[:, :, ::-1, ::-1].transpose(1, 0, 2, 3)
    dxp = _correlate_valid(dpad, wflip)
    return _fold_edge(dxp, p), dw, db


# -- network -----------------------------------------------------------------

def layer_shapes(layers: int, channels: int, kernel: int) -> list[tuple[int, ...]]:
    """Parameter shapes in storage order: W0, b0, W1, b1, ..."""
    if layers < 1 or channels < 1 or kernel < 1 or kernel % 2 == 0:
        raise ConfigurationError("need layers >= 1, channels >= 1 and an odd kernel size")
    shapes = []
    for i in range(layers):
        cin = 1 if i == 0 else channels
        cout = 1 if i == layers - 1 else channels
        shapes += [(cout, cin, kernel, kernel), (cout,)]
    return shapes


def init_params(layers: int, channels: int, kernel: int, seed: int = 0) -> list[np.ndarray]:
    """Random fan-in scaled weights; the last layer starts at zero (identity map)."""
    rng = np.random.default_rng(seed)
    params = []
    for shape in layer_shapes(layers, channels, kernel):
        if len(shape) == 1:
            params.append(np.zeros(shape))
        else:
            fan_in = shape[1] * shape[2] * shape[3]
            params.append(rng.normal(0.0, 1.0 / np.sqrt(fan_in), size=shape))
    params[-2][:] = 0.0
    return params


def net_forward(params, xs):
    """Noise estimate for a batch ``xs`` of shape (B, H, W) plus a backward cache."""
    h = xs[:, None]
    cache = []
    n = len(params) // 2
    for i in range(n):
        a, hp = conv_forward(h, params[2 * i], params[2 * i + 1])
        if i < n - 1:
            h = np.tanh(a)
            cache.append((hp, h))
        else:
            cache.append((hp, None))
            h = a
    return h[:, 0], cache


def net_backward(params, cache, dnoise):
    """Gradients of a scalar with respect to every parameter, given d/d(noise)."""
    grads = [None] * len(params)
    d = dnoise[:, None]
    for i in reversed(range(len(params) // 2)):
        hp, act = cache[i]
        if act is not None:
            d = d * (1.0 - act**2)
        d, grads[2 * i], grads[2 * i + 1] = conv_backward(d, hp, params[2 * i])
    return grads


@dataclass
class DenoiserModel:
    layers: int
    channels: int
    kernel: int
    params: list[np.ndarray]
    range: AffineRange
    trained_looks: float = 1.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        shapes = layer_shapes(self.layers, self.channels, self.kernel)
        if [tuple(p.shape) for p in self.params] != shapes:
            raise ConfigurationError("parameter shapes do not match the architecture")
        if not all(np.all(np.isfinite(p)) for p in self.params):
            raise ConfigurationError("non-finite model parameters")

    @classmethod
    def initial(cls, layers=5, channels=32, kernel=3, range=AffineRange(0.0, 1.0),
                trained_looks=1.0, seed=0) -> "DenoiserModel":
        params = [p.astype(np.float32) for p in init_params(layers, channels, kernel, seed)]
        return cls(layers, channels, kernel, params, range, trained_looks)

    @property
    def receptive_field(self) -> int:
        return 1 + self.layers * (self.kernel - 1)

    @property
    def n_params(self) -> int:
        return sum(p.size for p in self.params)

    def denoise(self, y, looks=None):
        """Inference entry point; ``looks`` is ignored (fixed at training)."""
        return cnn_forward(self, y)

    def __eq__(self, other):
        if not isinstance(other, DenoiserModel):
            return NotImplemented
        same_floats = (np.float64(self.range.low).tobytes() == np.float64(other.range.low).tobytes()
                       and np.float64(self.range.high).tobytes() == np.float64(other.range.high).tobytes()
                       and np.float64(self.trained_looks).tobytes()
                       == np.float64(other.trained_looks).tobytes())
        return ((self.layers, self.channels, self.kernel)
                == (other.layers, other.channels, other.kernel)
                and same_floats
                and all(a.dtype == b.dtype and a.tobytes() == b.tobytes()
                        for a, b in zip(self.params, other.params)))


def network_output(params, y, r: AffineRange, batch=False):
    y = np.asarray(y, dtype=np.float64)
    yb = y if batch else y[None]
    noise, cache = net_forward(params, rescale(yb, r))
    f = yb - r.span * noise
    return (f if batch else f[0]), cache


def cnn_forward(model: DenoiserModel, y: np.ndarray) -> np.ndarray:
    """Denoise a single log-image with ``model``; output has the input shape."""
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 2 or min(y.shape) < model.receptive_field:
        raise DimensionError(
            f"image {y.shape} smaller than receptive field {model.receptive_field}")
    params = [p.astype(np.float64) for p in model.params]
    return network_output(params, y, model.range)[0]


# -- serialization -----------------------------------------------------------

def save_model(model: DenoiserModel, path) -> None:
    """Write ``model`` in the RDNM binary format.

    Layout (little-endian): magic ``RDNM``, u32 version, u32 layers,
    u32 channels, u32 kernel, f64 m, f64 M, f64 trained looks, then float32
    parameters in the order W0, b0, W1, b1, ... with weights stored as
    (out, in, k, k) in C order.
    """
    header = _HEADER.pack(MODEL_MAGIC, MODEL_VERSION, model.layers, model.channels,
                          model.kernel, model.range.low, model.range.high,
                          model.trained_looks)
    payload = b"".join(np.asarray(p, dtype="<f4").tobytes() for p in model.params)
    Path(path).write_bytes(header + payload)


def load_model(path) -> DenoiserModel:
    raw = Path(path).read_bytes()
    if raw[:4] != MODEL_MAGIC:
        raise BadMagicError(f"{path}: not an RDNM model file")
    if len(raw) < _HEADER.size:
        raise TruncatedError(f"{path}: truncated header")
    _, version, layers, channels, kernel, low, high, looks = _HEADER.unpack_from(raw)
    if version != MODEL_VERSION:
        raise UnsupportedVersionError(f"{path}: model version {version}")
    shapes = layer_shapes(layers, channels, kernel)
    expected = 4 * sum(int(np.prod(s)) for s in shapes)
    if len(raw) - _HEADER.size != expected:
        raise TruncatedError(f"{path}: expected {expected} parameter bytes, "
                             f"found {len(raw) - _HEADER.size}")
    params, off = [], _HEADER.size
    for s in shapes:
        n = int(np.prod(s))
        params.append(np.frombuffer(raw, dtype="<f4", count=n, offset=off)
                      .reshape(s).astype(np.float32))
        off += 4 * n
    return DenoiserModel(layers, channels, kernel, params, AffineRange(low, high), looks)
