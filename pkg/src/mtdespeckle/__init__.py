"""Ratio-based multi-temporal SAR despeckling on simulated stacks."""
from .denoise import BoxDenoiser, IdentityDenoiser, TrainConfig, train_self_supervised
from .metrics import EvalReport, evaluate, mse_log, psnr_log, residual_ratio_stats
from .ratio import (
    despeckle_ratio,
    despeckle_single,
    form_ratio,
    normalization_factor,
    normalize_super,
    recombine,
)
from .speckle import (
    apply_speckle,
    estimate_enl,
    fisher_tippett_pdf,
    from_log,
    gamma_pdf,
    log_speckle_bias,
    sample_correlated_speckle,
    sample_speckle,
    to_log,
)
from .stack import ChangeEvent, Stack, SuperImage, build_super_image, simulate_stack, temporal_mean

__version__ = "0.1.0"
