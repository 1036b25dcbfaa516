"""
Speckle statistics
==================

Fully developed speckle multiplies the reflectivity by a unit-mean gamma
variable. This script draws speckle fields, checks their moments, the
log-domain bias that any log-space filter has to undo, and what spatial
correlation does to the field.
"""
import numpy as np

from mtdespeckle.denoise import downsample2
from mtdespeckle.speckle import (
    estimate_enl,
    log_speckle_bias,
    sample_correlated_speckle,
    sample_speckle,
)

# %%
# Moments of L-look speckle: mean 1, variance 1/L.
for looks in (1, 4, 16):
    u = sample_speckle(1000, 1000, looks, seed=1).astype(np.float64)
    print(f"L={looks:2d}  mean={u.mean():.4f}  var={u.var():.4f}  (1/L={1 / looks:.4f})"
          f"  ENL estimate={estimate_enl(u):.2f}")

# %%
# In log domain the speckle is additive but biased: E[log u] = psi(L) - log L.
for looks in (1, 4, 16):
    z = np.log(sample_speckle(1000, 1000, looks, seed=2).astype(np.float64))
    print(f"L={looks:2d}  mean log-speckle={z.mean():+.4f}  theory={log_speckle_bias(looks):+.4f}")

# %%
# Correlated single-look speckle, and the effect of 2x2 averaging.
def lag1(a):
    a = np.asarray(a, dtype=np.float64)
    return np.corrcoef(a[:, :-1].ravel(), a[:, 1:].ravel())[0, 1]


for radius in (0, 1, 2):
    u = sample_correlated_speckle(512, 512, radius, seed=3)
    print(f"radius={radius}  lag-1 corr={lag1(u):.3f}  after downsample2={lag1(downsample2(u)):.3f}")
