"""Multi-temporal stacks: simulation, temporal averaging and super-images."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError
from .speckle import (
    DEFAULT_EPS,
    apply_speckle,
    estimate_enl,
    from_log,
    sample_correlated_speckle,
    sample_speckle,
    to_log,
)

Rect = tuple[int, int, int, int]  # (row0, col0, row1, col1), half-open


@dataclass(frozen=True)
class ChangeEvent:
    """Multiplicative reflectivity change over a region for a set of dates.

    ``region`` is either a ``(row0, col0, row1, col1)`` rectangle or a
    boolean mask with the image shape. ``dates`` are indices into the stack.
    """

    region: object
    dates: tuple[int, ...]
    gain: float

    def __post_init__(self):
        if not self.gain > 0:
            raise ValueError("change gain must be > 0")
        object.__setattr__(self, "dates", tuple(int(d) for d in self.dates))

    def mask(self, shape: tuple[int, int]) -> np.ndarray:
        if isinstance(self.region, np.ndarray) and self.region.dtype == bool:
            if self.region.shape != shape:
                raise DimensionError("change mask shape does not match the image")
            return self.region
        r0, c0, r1, c1 = (int(x) for x in self.region)
        h, w = shape
        if not (0 <= r0 < r1 <= h and 0 <= c0 < c1 <= w):
            raise IndexError(f"change region {self.region} outside {h}x{w} image")
        m = np.zeros(shape, dtype=bool)
        m[r0:r1, c0:c1] = True
        return m


@dataclass
class Stack:
    """Co-registered intensity images, shape ``(T, H, W)``."""

    images: np.ndarray
    dates: tuple[str, ...]
    looks: float = 1.0
    changes: list[ChangeEvent] = field(default_factory=list)

    def __post_init__(self):
        self.images = np.asarray(self.images)
        if self.images.ndim != 3:
            raise DimensionError("stack images must have shape (T, H, W)")
        if self.images.shape[0] < 2:
            raise ValueError("a stack needs at least 2 images")
        if len(self.dates) != self.images.shape[0]:
            raise ValueError("one date label per image is required")
        if len(set(self.dates)) != len(self.dates):
            raise ValueError("duplicate date labels in stack")
        if self.looks < 1:
            raise ValueError("number of looks must be >= 1")

    def __len__(self):
        return self.images.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.images.shape[1:]


@dataclass
class SuperImage:
    data: np.ndarray
    enl: float
    smoothed: bool = False


def _speckle_for_date(shape, looks, kernel_radius, seed, t):
    h, w = shape
    date_seed = np.random.SeedSequence([int(seed), int(t)]).generate_state(1)[0]
    if kernel_radius == 0:
        return sample_speckle(w, h, looks, int(date_seed))
    n = int(round(looks))
    if n != looks:
        raise ValueError("correlated speckle needs an integer number of looks")
    acc = np.zeros(shape)
    for k in range(n):
        acc += sample_correlated_speckle(w, h, kernel_radius, int(date_seed) + k)
    return (acc / n).astype(np.float32)


def simulate_stack(v: np.ndarray, frames: int, looks: float = 1.0,
                   changes: Sequence[ChangeEvent] = (), kernel_radius: int = 0,
                   seed: int = 0) -> Stack:
    """Speckle ``frames`` independent acquisitions of the reflectivity ``v``.

    Date ``t`` sees ``v`` multiplied by the gain of every change active at
    ``t``, times a fresh speckle draw seeded from ``(seed, t)``. The speckle
    draws do not depend on the changes.
    """
    if frames < 2:
        raise ValueError("a stack needs at least 2 frames")
    v = np.asarray(v, dtype=np.float64)
    masks = [(c, c.mask(v.shape)) for c in changes]
    images = np.empty((frames, *v.shape), dtype=np.float32)
    for t in range(frames):
        vt = v.copy()
        for c, m in masks:
            if t in c.dates:
                vt[m] *= c.gain
        images[t] = apply_speckle(vt, _speckle_for_date(v.shape, looks, kernel_radius, seed, t))
    dates = tuple(f"t{t:03d}" for t in range(frames))
    return Stack(images, dates, looks, list(changes))


def temporal_mean(stack: Stack) -> np.ndarray:
    """Pixelwise arithmetic mean of the intensities over time."""
    return np.mean(stack.images, axis=0, dtype=np.float64).astype(np.float32)


def crop(image: np.ndarray, region: Optional[Rect]) -> np.ndarray:
    if region is None:
        return image
    r0, c0, r1, c1 = region
    out = image[r0:r1, c0:c1]
    if out.size < 2:
        raise DimensionError(f"region {region} holds fewer than 2 pixels")
    return out


def build_super_image(stack: Stack, smooth: Optional[object] = None,
                      region: Optional[Rect] = None, eps: float = DEFAULT_EPS) -> SuperImage:
    """Temporal mean of ``stack``, optionally smoothed spatially.

    ``smooth`` is any denoiser exposing ``denoise(log_image, looks)``; it is
    run on the log of the mean with the ENL measured over ``region``. When
    ``region`` is None the whole image is used, which overestimates speckle
    (and underestimates ENL) on heterogeneous scenes.
    """
    mean = temporal_mean(stack)
    if smooth is not None:
        enl = estimate_enl(crop(mean, region))
        mean = from_log(smooth.denoise(to_log(mean, eps), enl))
    data = np.maximum(mean, np.float32(eps)).astype(np.float32)
    return SuperImage(data, estimate_enl(crop(data, region)), smooth is not None)
