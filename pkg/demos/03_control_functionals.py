# %% [markdown]
# # Control functionals
# Fit a surrogate s on a grid, then integrate φ - s + μ(s) instead of φ.
# The integral is unchanged, but the variation shrinks with the grid.

# %%
import numpy as np

from cfqmc.control_functional import cf_transform, fit_grid_surrogate, fit_kernel_surrogate, residual_variation
from cfqmc.discrepancy import hk_variation_1d
from cfqmc.functions import builtin
from cfqmc.lds import SequenceSpec, generate

f = builtin("fig1")
s = fit_grid_surrogate(f, 16)
g = cf_transform(f, s)
x = (np.arange(2**16) + 0.5) / 2**16
print("mean of surrogate:", s.analytic_mean, " quadrature of φ̂:", np.mean(g(x)))
print("V(φ) =", hk_variation_1d(f).value, " V(φ̂) =", hk_variation_1d(g).value)

# %%
for n, v in residual_variation(f, [8, 16, 32, 64, 128]):
    print(f"nodes={n:4d}  V(φ̂)={v:.4f}")

# %%
print("2d product function:")
for n, v in residual_variation(builtin("prod-fig1", 2), [4, 8, 16, 32]):
    print(f"nodes={n:5d}  proxy V(φ̂)={v:.3f}")

# %%
# kernel surrogate with a closed-form mean
v = generate(SequenceSpec("midpoint-grid", 1, resolution=32), 32)
k = fit_kernel_surrogate(f, v, lengthscale=0.1, ridge=1e-8)
print("kernel mean:", k.analytic_mean, " max interior error:", np.abs(f(x) - k(x))[(x > 0.05) & (x < 0.95)].max())
