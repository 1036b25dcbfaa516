"""Non-learned denoisers and resampling."""
from __future__ import annotations

import numpy as np
from scipy import ndimage

from ..speckle import log_speckle_bias


def baseline_denoise(y: np.ndarray, looks: float = 1.0, radius: int = 3,
                     debias: bool = True) -> np.ndarray:
    """Box mean of a log-image over a ``(2r+1)^2`` window (edge replication).

    With ``debias`` the mean log-speckle ``psi(L) - log L`` is subtracted so
    the result estimates the log of the reflectivity rather than its
    geometric mean.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    y = np.asarray(y, dtype=np.float64)
    out = y.copy() if radius == 0 else ndimage.uniform_filter(y, 2 * radius + 1, mode="nearest")
    if debias:
        out -= log_speckle_bias(looks)
    return out


class IdentityDenoiser:
    """Returns its input; useful to check pipeline algebra."""

    def denoise(self, y, looks=1.0):
        return np.asarray(y, dtype=np.float64)


class BoxDenoiser:
    def __init__(self, radius: int = 3, debias: bool = True):
        self.radius = radius
        self.debias = debias

    def denoise(self, y, looks=1.0):
        return baseline_denoise(y, looks, self.radius, self.debias)

    def __repr__(self):
        return f"BoxDenoiser(radius={self.radius}, debias={self.debias})"


def downsample2(w: np.ndarray) -> np.ndarray:
    """Average 2x2 blocks of linear intensity.

    An odd trailing row or column is dropped.
    """
    w = np.asarray(w, dtype=np.float64)
    h, wd = (w.shape[0] // 2) * 2, (w.shape[1] // 2) * 2
    w = w[:h, :wd]
    out = 0.25 * (w[0::2, 0::2] + w[1::2, 0::2] + w[0::2, 1::2] + w[1::2, 1::2])
    return out.astype(np.float32)
