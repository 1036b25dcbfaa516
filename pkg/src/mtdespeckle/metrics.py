"""Log-domain fidelity metrics and residual-ratio checks."""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Optional

import numpy as np

from .speckle import DEFAULT_EPS, check_same_shape, estimate_enl, to_log
from .stack import Rect, crop


def mse_log(estimate: np.ndarray, truth: np.ndarray, eps: float = DEFAULT_EPS) -> float:
    """Mean squared difference of log-intensities."""
    check_same_shape(estimate, truth)
    if np.any(np.asarray(truth) <= 0):
        raise ValueError("truth must be > 0")
    return float(np.mean((to_log(estimate, eps) - to_log(truth, eps)) ** 2))


def psnr_log(estimate: np.ndarray, truth: np.ndarray, peak: Optional[float] = None,
             eps: float = DEFAULT_EPS) -> float:
    """PSNR in dB of the log-images; ``peak`` defaults to the log-range of ``truth``.

    Returns ``inf`` for a perfect estimate.
    """
    err = mse_log(estimate, truth, eps)
    if peak is None:
        peak = float(np.ptp(to_log(truth, eps)))
    return psnr_from_mse(err, peak)


def psnr_from_mse(err: float, peak: float) -> float:
    if err == 0:
        return float("inf")
    return float(10.0 * np.log10(peak**2 / err))


def residual_ratio_stats(w: np.ndarray, estimate: np.ndarray) -> tuple[float, float]:
    """Mean and ENL of ``w / estimate``.

    For a good restoration the residual is pure speckle: mean 1, ENL close
    to the looks count of ``w``.
    """
    check_same_shape(w, estimate)
    est = np.asarray(estimate, dtype=np.float64)
    if np.any(est <= 0):
        raise ValueError("estimate must be > 0")
    ratio = np.asarray(w, dtype=np.float64) / est
    return float(ratio.mean()), estimate_enl(ratio)


@dataclass
class EvalReport:
    mse_log: float
    psnr_log: float
    enl_region: float
    ratio_mean: float = float("nan")
    ratio_enl: float = float("nan")

    def to_text(self) -> str:
        return "".join(f"{k}={v!r}\n" for k, v in asdict(self).items())

    @classmethod
    def from_text(cls, text: str) -> "EvalReport":
        values = {}
        for line in text.splitlines():
            if line.strip():
                key, _, val = line.partition("=")
                values[key.strip()] = float(val)
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in values.items() if k in names})


def evaluate(estimate: np.ndarray, truth: np.ndarray, noisy: Optional[np.ndarray] = None,
             region: Optional[Rect] = None, eps: float = DEFAULT_EPS) -> EvalReport:
    """Bundle the metrics; ``enl_region`` is measured on the estimate over ``region``."""
    err = mse_log(estimate, truth, eps)
    report = EvalReport(err, psnr_from_mse(err, float(np.ptp(to_log(truth, eps)))),
                        estimate_enl(crop(np.asarray(estimate), region)))
    if noisy is not None:
        report.ratio_mean, report.ratio_enl = residual_ratio_stats(noisy, estimate)
    return report
