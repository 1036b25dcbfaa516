"""Self-supervised training on co-registered stacks.

Each batch element pairs the log-image of one date (input) with the
log-image of another date (target) over the same random patch, and the
likelihood loss is minimised by SGD with momentum. Because the speckle of
two dates is independent and unit-mean, the loss is minimised in
expectation by the log reflectivity. Stacks must be free of changes.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError, DimensionError
from ..speckle import DEFAULT_EPS, to_log
from .loss import loss_gradient, loss_likelihood
from .network import AffineRange, DenoiserModel, init_params, net_backward, network_output

log = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    epochs: int = 10
    batch_size: int = 8
    patch_size: int = 32
    learning_rate: float = 1e-3
    momentum: float = 0.9
    seed: int = 0
    validation_fraction: float = 0.25
    batches_per_epoch: int = 32
    clip_norm: float | None = 1.0
    layers: int = 5
    channels: int = 32
    kernel: int = 3

    def __post_init__(self):
        for name in ("epochs", "batch_size", "patch_size", "batches_per_epoch"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be >= 1")
        if not self.learning_rate > 0:
            raise ConfigurationError("learning_rate must be > 0")
        if not 0 <= self.validation_fraction < 1:
            raise ConfigurationError("validation_fraction must lie in [0, 1)")
        if not 0 <= self.momentum < 1:
            raise ConfigurationError("momentum must lie in [0, 1)")


@dataclass
class TrainHistory:
    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)


def pairwise_risk(params, logs: np.ndarray, r: AffineRange) -> float:
    """Mean likelihood loss over all ordered date pairs ``(i, j)``, ``i != j``."""
    t = logs.shape[0]
    f, _ = network_output(params, logs, r, batch=True)
    total = 0.0
    for i in range(t):
        for j in range(t):
            if i != j:
                total += loss_likelihood(f[i], logs[j])
    return total / (t * (t - 1))


def loss_and_grads(params, y_in, y_target, r: AffineRange):
    """Batch loss and parameter gradients for inputs/targets of shape (B, H, W)."""
    f, cache = network_output(params, y_in, r, batch=True)
    dnoise = -r.span * loss_gradient(f, y_target)
    return loss_likelihood(f, y_target), net_backward(params, cache, dnoise)


def _split(h: int, cfg: TrainConfig, receptive: int) -> int:
    n_val = int(round(h * cfg.validation_fraction))
    if n_val and n_val < receptive:
        raise DimensionError(f"validation band of {n_val} rows is below the receptive field")
    if h - n_val < cfg.patch_size:
        raise DimensionError("training band is smaller than the patch size")
    return h - n_val


def train_self_supervised(stack, config: TrainConfig | None = None,
                          history: TrainHistory | None = None,
                          eps: float = DEFAULT_EPS) -> DenoiserModel:
    """Fit a :class:`DenoiserModel` on a change-free stack.

    The bottom ``validation_fraction`` of the rows is held out; its
    all-pairs risk is recorded in ``history.val_loss`` (entry 0 is the
    untrained network). The affine range is the min/max log-intensity of the
    whole stack.
    """
    cfg = config or TrainConfig()
    images = np.asarray(stack.images)
    t, h, w = images.shape
    if t < 2:
        raise ConfigurationError("self-supervised training needs at least 2 dates")
    if w < cfg.patch_size:
        raise DimensionError("image narrower than the patch size")
    logs = to_log(images, eps)
    r = AffineRange(float(logs.min()), float(logs.max()))
    receptive = 1 + cfg.layers * (cfg.kernel - 1)
    h_train = _split(h, cfg, receptive)
    val = logs[:, h_train:]

    rng = np.random.default_rng(cfg.seed)
    params = init_params(cfg.layers, cfg.channels, cfg.kernel, seed=int(rng.integers(2**63)))
    velocity = [np.zeros_like(p) for p in params]
    hist = history if history is not None else TrainHistory()
    if val.shape[1]:
        hist.val_loss.append(pairwise_risk(params, val, r))

    p = cfg.patch_size
    for epoch in range(cfg.epochs):
        epoch_loss = 0.0
        for _ in range(cfg.batches_per_epoch):
            i = rng.integers(t, size=cfg.batch_size)
            j = (i + rng.integers(1, t, size=cfg.batch_size)) % t
            r0 = rng.integers(h_train - p + 1, size=cfg.batch_size)
            c0 = rng.integers(w - p + 1, size=cfg.batch_size)
            y_in = np.stack([logs[a, y:y + p, x:x + p] for a, y, x in zip(i, r0, c0)])
            y_tg = np.stack([logs[b, y:y + p, x:x + p] for b, y, x in zip(j, r0, c0)])
            loss, grads = loss_and_grads(params, y_in, y_tg, r)
            if cfg.clip_norm is not None:
                norm = np.sqrt(sum(np.sum(g**2) for g in grads))
                if norm > cfg.clip_norm:
                    grads = [g * (cfg.clip_norm / norm) for g in grads]
            for prm, vel, g in zip(params, velocity, grads):
                vel *= cfg.momentum
                vel -= cfg.learning_rate * g
                prm += vel
            epoch_loss += loss
        hist.train_loss.append(epoch_loss / cfg.batches_per_epoch)
        if val.shape[1]:
            hist.val_loss.append(pairwise_risk(params, val, r))
        log.info("epoch %d train %.4f val %s", epoch + 1, hist.train_loss[-1],
                 hist.val_loss[-1] if hist.val_loss else "-")

    return DenoiserModel(cfg.layers, cfg.channels, cfg.kernel,
                         [q.astype(np.float32) for q in params], r, float(stack.looks),
                         meta={"train_loss": hist.train_loss, "val_loss": hist.val_loss})
