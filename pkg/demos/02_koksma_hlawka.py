# %% [markdown]
# # Both factors of the Koksma-Hlawka bound
# The error of an equal-weight rule is at most the integrand's variation
# times the point set's star discrepancy.

# %%
import numpy as np

from cfqmc.discrepancy import hk_variation_1d, kh_bound, star_discrepancy_1d
from cfqmc.functions import builtin
from cfqmc.lds import SequenceSpec, generate

f = builtin("fig1")  # sin(2πx) + 4x
print("V(f) =", hk_variation_1d(f).value)

# %%
for n in (16, 64, 256, 1024):
    ps = generate(SequenceSpec("halton", 1), n)
    error = abs(np.mean(f(ps.points)) - f.true_integral)
    print(f"N={n:5d}  D*={star_discrepancy_1d(ps).value:.2e}  bound={kh_bound(f, ps):.2e}  error={error:.2e}")
