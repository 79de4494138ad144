# %% [markdown]
# Decodability of a product state on the torus
#
# Every edge carries cos(theta/2)|0> + sin(theta/2)|1>. Measuring the plaquette
# operators gives a syndrome m; the basis states behind that syndrome split
# into four homology classes q. kappa[m, q] is the weight of each class and
# the sum over m of the largest weight says how well a decoder with perfect
# knowledge of the state could do.

# %%
import math

import numpy as np

from oneform import lattice as lt, qstate as qs

lat = lt.build_torus(2, 2)
for frac in (0.0, 0.05, 0.15, 0.25, 0.5):
    table = qs.kappa_exact(qs.product_state(lat, frac * math.pi), lat)
    print(f"theta = {frac:.2f} pi   sum_m max_q kappa = {qs.sum_max_kappa(table):.6f}")

# %% [markdown]
# At theta = pi/2 every class is equally likely for every syndrome, so the
# score drops to 1/4. Tiny tori are dominated by ties; the thermodynamic
# statement needs sampling on larger lattices.

# %%
from oneform import decode as dc

for L in (8, 16):
    lat = lt.build_torus(L, L)
    for p in (0.06, 0.10, 0.14):
        errors = qs.error_batch(lat, p, seed=1, start=0, count=2000)
        _, _, wx, wy = dc.mwpm_batch(lat, errors)
        wz = 0.5 * (wx + wy)
        print(f"L = {L:2d}  p = {p:.2f}  <W_Z> = {wz.mean():.3f} +- {wz.std(ddof=1) / np.sqrt(wz.size):.3f}")

# %% [markdown]
# Below p of roughly 0.10 larger lattices decode better, above it they decode
# worse. The CLI runs the full scan:
#
#     oneform --experiment wz-scan --L 8 --L 12 --L 16 --grid 0.06:0.14:0.01 --samples 10000 --seed 7 --out wz.csv
