# %% [markdown]
# Folded subsystem on a cylinder, and a local decoder
#
# Subsystem A spans the open direction of an N x 2N cylinder. Charges in A are
# decoded twice, once with the whole system and once on A folded into a torus;
# the score is the parity of the difference across the A|B seam.

# %%
import numpy as np

from oneform import decode as dc, lattice as lt, planar as pl, qstate as qs

for N in (8, 12):
    region = pl.centered_region(N)
    for p in (0.05, 0.10, 0.20):
        mean, err = pl.folded_indicator(qs.error_batch(region.full, p, 4, 0, 1000), region)
        print(f"A = {N}x{N}  p = {p:.2f}  indicator {mean:.3f} +- {err:.3f}")

# %% [markdown]
# The local decoder fuses charges inside 2x2 blocks and then works on the
# coarser lattice. The residual charge density per round shrinks below its
# threshold and grows above it.

# %%
lat = lt.build_torus(32, 32)
for p in (0.02, 0.04, 0.06, 0.08):
    dens = dc.local_densities(lat, qs.error_batch(lat, p, 5, 0, 300)).mean(axis=0)
    print(f"p = {p:.2f}  density per round {np.round(dens, 4)}")
