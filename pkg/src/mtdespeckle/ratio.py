"""Ratio-based multi-temporal despeckling.

The speckled image ``w`` is divided by a normalized super-image ``s' = s/lam``
where ``lam`` is the geometric mean of ``s``. The ratio keeps the log-domain
range of ``w`` (its mean log-intensity is unchanged), is denoised in log
domain and multiplied back by ``s'``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .speckle import DEFAULT_EPS, check_same_shape, from_log, to_log
from .stack import SuperImage


@dataclass
class NormalizedSuperImage:
    data: np.ndarray
    lam: float


def _super_data(s) -> np.ndarray:
    data = s.data if isinstance(s, SuperImage) else s
    return np.asarray(data)


def normalization_factor(s) -> float:
    """Geometric mean of the super-image pixels."""
    data = np.asarray(_super_data(s), dtype=np.float64)
    if np.any(data <= 0):
        raise ValueError("super-image pixels must be > 0")
    return float(np.exp(np.mean(np.log(data))))


def normalize_super(s) -> NormalizedSuperImage:
    data = np.asarray(_super_data(s), dtype=np.float64)
    if np.any(data <= 0):
        raise ValueError("super-image pixels must be > 0")
    logs = np.log(data)
    mu = np.mean(logs)
    # exp(log s - mean) rather than s/lam: a constant s maps to exactly 1.
    # Rounding to float32 absorbs the float64 noise of log(alpha*s), so the
    # output does not depend on the scale of s.
    return NormalizedSuperImage(np.exp(logs - mu).astype(np.float32), float(np.exp(mu)))


def form_ratio(w: np.ndarray, s_norm: NormalizedSuperImage) -> np.ndarray:
    check_same_shape(w, s_norm.data)
    return np.asarray(w, dtype=np.float64) / s_norm.data


def recombine(tau_hat: np.ndarray, s_norm: NormalizedSuperImage) -> np.ndarray:
    check_same_shape(tau_hat, s_norm.data)
    return (np.asarray(tau_hat, dtype=np.float64) * s_norm.data).astype(np.float32)


def despeckle_ratio(w: np.ndarray, s, denoiser, looks: float = 1.0,
                    eps: float = DEFAULT_EPS) -> np.ndarray:
    """Restore ``w`` by denoising its ratio to the normalized super-image.

    ``denoiser.denoise`` receives the log-ratio and the looks count of ``w``;
    the super-image is treated as noise-free.
    """
    s_norm = normalize_super(s)
    tau = form_ratio(w, s_norm)
    tau_hat = np.exp(denoiser.denoise(to_log(tau, eps), looks))
    return recombine(tau_hat, s_norm)


def despeckle_single(w: np.ndarray, denoiser, looks: float = 1.0,
                     eps: float = DEFAULT_EPS) -> np.ndarray:
    """Single-image restoration with the same denoiser (no temporal information)."""
    return from_log(denoiser.denoise(to_log(w, eps), looks))
