"""Log-domain denoisers: box baseline, residual CNN, likelihood loss, training."""
from .baseline import BoxDenoiser, IdentityDenoiser, baseline_denoise, downsample2
from .loss import loss_gradient, loss_likelihood
from .network import (
    AffineRange,
    DenoiserModel,
    cnn_forward,
    load_model,
    rescale,
    save_model,
    unrescale,
)
from .training import TrainConfig, TrainHistory, train_self_supervised

__all__ = [
    "AffineRange", "BoxDenoiser", "DenoiserModel", "IdentityDenoiser", "TrainConfig",
    "TrainHistory", "baseline_denoise", "cnn_forward", "downsample2", "load_model",
    "loss_gradient", "loss_likelihood", "rescale", "save_model", "train_self_supervised",
    "unrescale",
]
