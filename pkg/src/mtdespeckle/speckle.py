"""Speckle statistics: gamma sampling, the two likelihood densities, log
transforms and equivalent-number-of-looks estimation.

Images are plain 2-D numpy arrays. Intensity images produced by this
package are ``float32``; intermediate arithmetic is done in ``float64``.

Random numbers come from numpy's PCG64 bit generator seeded through
``numpy.random.default_rng``. Derived streams (one per date, per look ...)
are obtained with :func:`derive_rng`, so a given ``(seed, key)`` always maps
to the same stream regardless of call order.
"""
from __future__ import annotations

import numpy as np
from scipy import ndimage, special

from .errors import DimensionError

#: Floor applied before taking logarithms of intensities.
DEFAULT_EPS = 1e-10

#: Returned by :func:`estimate_enl` when a region has zero variance.
INFINITE_ENL = 1e9


def derive_rng(seed: int, *key: int) -> np.random.Generator:
    """PCG64 generator for the stream identified by ``(seed, *key)``."""
    return np.random.default_rng([int(seed), *(int(k) for k in key)])


def _check_shape(width: int, height: int) -> None:
    if width < 1 or height < 1:
        raise DimensionError(f"image dimensions must be >= 1, got {width}x{height}")


def check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if np.shape(a) != np.shape(b):
        raise DimensionError(f"dimension mismatch: {np.shape(a)} vs {np.shape(b)}")


def sample_speckle(width: int, height: int, looks: float = 1.0, seed: int = 0) -> np.ndarray:
    """Draw an i.i.d. Gamma(L, 1/L) speckle field of shape ``(height, width)``.

    Mean is 1 and variance 1/L.
    """
    _check_shape(width, height)
    if looks < 1:
        raise ValueError(f"number of looks must be >= 1, got {looks}")
    rng = derive_rng(seed)
    u = rng.gamma(shape=looks, scale=1.0 / looks, size=(height, width))
    return u.astype(np.float32)


def gaussian_kernel(radius: int) -> np.ndarray:
    """1-D Gaussian kernel of half-width ``radius`` (sigma = radius/2), unit sum."""
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / (0.5 * radius)) ** 2)
    return k / k.sum()


def sample_correlated_speckle(width: int, height: int, kernel_radius: int = 1,
                              seed: int = 0) -> np.ndarray:
    """Single-look speckle with spatial correlation.

    A circular complex Gaussian field (unit power) is filtered by a separable
    Gaussian kernel, its squared modulus is taken and divided by the analytic
    mean power of the filtered field. The field is drawn with a margin of
    ``kernel_radius`` pixels and cropped, so the statistics are stationary up
    to the borders. ``kernel_radius=0`` is exactly ``sample_speckle(L=1)``.
    """
    _check_shape(width, height)
    if kernel_radius < 0:
        raise ValueError("kernel_radius must be >= 0")
    if kernel_radius == 0:
        return sample_speckle(width, height, 1.0, seed)
    r = int(kernel_radius)
    rng = derive_rng(seed)
    shape = (height + 2 * r, width + 2 * r)
    re = rng.standard_normal(shape) * np.sqrt(0.5)
    im = rng.standard_normal(shape) * np.sqrt(0.5)
    k = gaussian_kernel(r)
    for field in (re, im):
        ndimage.correlate1d(field, k, axis=0, output=field, mode="constant")
        ndimage.correlate1d(field, k, axis=1, output=field, mode="constant")
    inner = (slice(r, r + height), slice(r, r + width))
    power = re[inner] ** 2 + im[inner] ** 2
    # E|z|^2 after filtering = sum of squared 2-D weights = (sum k^2)^2
    power /= np.sum(k**2) ** 2
    return power.astype(np.float32)


def apply_speckle(v: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Multiplicative speckle model ``w = v * u``."""
    check_same_shape(v, u)
    return (np.asarray(v, np.float64) * np.asarray(u, np.float64)).astype(np.float32)


def _log_norm(looks):
    return looks * np.log(looks) - special.gammaln(looks)


def gamma_pdf(u, looks: float):
    """Gamma speckle density ``L^L / Gamma(L) u^(L-1) exp(-L u)``."""
    u = np.asarray(u, dtype=np.float64)
    if np.any(u < 0):
        raise ValueError("gamma_pdf is defined for u >= 0")
    if looks < 1:
        raise ValueError("number of looks must be >= 1")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp(_log_norm(looks) + looks * (np.log(u) - u)) / u
    if looks == 1:
        out = np.where(u == 0, 1.0, out)
    else:
        out = np.where(u == 0, 0.0, out)
    return out[()] if out.ndim == 0 else out


def fisher_tippett_pdf(z, looks: float):
    """Density of log-speckle ``z = log u``: ``L^L/Gamma(L) exp(L z) exp(-L e^z)``."""
    if looks < 1:
        raise ValueError("number of looks must be >= 1")
    z = np.asarray(z, dtype=np.float64)
    out = np.exp(_log_norm(looks) + looks * (z - np.exp(z)))
    return out[()] if out.ndim == 0 else out


def log_speckle_bias(looks: float) -> float:
    """Mean of log-speckle, ``psi(L) - log(L)``."""
    if looks < 1:
        raise ValueError("number of looks must be >= 1")
    return float(special.digamma(looks) - np.log(looks))


def to_log(w: np.ndarray, eps: float = DEFAULT_EPS) -> np.ndarray:
    if eps <= 0:
        raise ValueError("eps must be > 0")
    return np.log(np.maximum(np.asarray(w, dtype=np.float64), eps))


def from_log(y: np.ndarray) -> np.ndarray:
    return np.exp(np.asarray(y, dtype=np.float64)).astype(np.float32)


def estimate_enl(region: np.ndarray) -> float:
    """Equivalent number of looks ``mean^2 / var`` over a homogeneous region.

    The result is clamped below at 1. A region with zero variance returns
    :data:`INFINITE_ENL`, which is also the upper cap.
    """
    x = np.asarray(region, dtype=np.float64).ravel()
    if x.size < 2:
        raise DimensionError("ENL estimation needs at least 2 pixels")
    var = x.var(ddof=1)
    mean = x.mean()
    if var <= 0 or mean**2 >= var * INFINITE_ENL:
        return INFINITE_ENL
    return float(max(mean**2 / var, 1.0))
