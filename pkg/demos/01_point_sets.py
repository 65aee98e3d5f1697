# %% [markdown]
# # Point sets
# Halton, scrambled + shifted Halton, iid uniform and midpoint grids, and how
# their star discrepancy compares as N grows.

# %%
import numpy as np

from cfqmc.discrepancy import star_discrepancy, star_discrepancy_1d
from cfqmc.lds import SequenceSpec, generate, radical_inverse

print([radical_inverse(n, 2) for n in range(1, 9)])

# %%
halton = generate(SequenceSpec("halton", dims=2), 8)
print(halton.points)

# %%
# same seed, same points; different seed, different scramble and shift
a = generate(SequenceSpec("scrambled-shifted-halton", 1, seed=1), 16)
b = generate(SequenceSpec("scrambled-shifted-halton", 1, seed=2), 16)
print(a == generate(SequenceSpec("scrambled-shifted-halton", 1, seed=1), 16), a == b)

# %%
print(f"{'N':>6} {'iid':>10} {'halton':>10} {'rqmc':>10} {'grid':>10}")
for n in (16, 64, 256, 1024):
    row = [
        star_discrepancy_1d(generate(SequenceSpec(kind, 1, seed=3, resolution=n if kind == "midpoint-grid" else None), n)).value
        for kind in ("iid-uniform", "halton", "scrambled-shifted-halton", "midpoint-grid")
    ]
    print(f"{n:>6} " + " ".join(f"{v:10.2e}" for v in row))

# %%
# exact enumeration in 2d for small sets
print(star_discrepancy(generate(SequenceSpec("halton", 2), 64)))
