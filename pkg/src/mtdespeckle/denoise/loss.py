"""Log-domain likelihood loss for gamma speckle.

With ``d = f - x`` the per-pixel loss is ``d + exp(-d)``: the negative
log-likelihood of a Fisher-Tippett observation ``x`` given the log
reflectivity ``f`` (up to constants). It is >= 1 with equality at ``f = x``.
"""
from __future__ import annotations

import numpy as np

from ..speckle import check_same_shape


def loss_likelihood(f: np.ndarray, x: np.ndarray) -> float:
    """Mean over pixels of ``f - x + exp(x - f)``."""
    check_same_shape(f, x)
    d = np.asarray(f, dtype=np.float64) - np.asarray(x, dtype=np.float64)
    return float(np.mean(d + np.exp(-d)))


def loss_gradient(f: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Gradient of :func:`loss_likelihood` with respect to ``f``."""
    check_same_shape(f, x)
    d = np.asarray(f, dtype=np.float64) - np.asarray(x, dtype=np.float64)
    return (1.0 - np.exp(-d)) / d.size
