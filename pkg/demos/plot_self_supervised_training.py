"""
Self-supervised training on a stack
===================================

The residual network is trained without clean references: each patch of
one date is denoised and scored against the same patch at another date with
the log-domain likelihood loss. Independent unit-mean speckle makes the log
reflectivity the minimiser in expectation. The trained model is then used
as the denoiser inside the ratio pipeline. Takes a couple of minutes on CPU.
"""
import logging

import numpy as np

from mtdespeckle.denoise import TrainConfig, TrainHistory, train_self_supervised
from mtdespeckle.metrics import mse_log
from mtdespeckle.ratio import despeckle_ratio, despeckle_single
from mtdespeckle.scene import reference_scene
from mtdespeckle.stack import build_super_image, simulate_stack

logging.basicConfig(level=logging.INFO, format="%(message)s")

v = reference_scene(128)

# %%
# Train on an 8-date change-free stack.
hist = TrainHistory()
model = train_self_supervised(simulate_stack(v, 8, 1.0, seed=10_000),
                              TrainConfig(epochs=25, seed=3), hist)
print("held-out loss per epoch:", np.round(hist.val_loss, 3))
print(f"{model.n_params} parameters, log range [{model.range.low:.2f}, {model.range.high:.2f}]")

# %%
# Use the network on a fresh acquisition, alone and through the ratio.
stack = simulate_stack(v, 25, 1.0, seed=1)
s = build_super_image(stack)
w = stack.images[0]
print(f"noisy           log-MSE={mse_log(w, v):.4f}")
print(f"network single  log-MSE={mse_log(despeckle_single(w, model), v):.4f}")
print(f"network ratio   log-MSE={mse_log(despeckle_ratio(w, s, model), v):.4f}")
