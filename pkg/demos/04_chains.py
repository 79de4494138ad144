# %% [markdown]
# One-dimensional analogues
#
# On a ring the product state is decodable for every theta below pi/2 once
# the chain is long enough; the closed form is compared with brute force.

# %%
import math

from oneform import chain1d as ch

for L in (4, 8, 12):
    row = [ch.criterion_1d(f * math.pi, L) for f in (0.1, 0.3, 0.45, 0.5)]
    print(f"L = {L:2d}  " + "  ".join(f"{v:.4f}" for v in row))

# %% [markdown]
# Transverse-field Ising ring: majority vote on Z-basis snapshots of the
# ground state. With a small longitudinal field the recovered magnetization
# grows with L even in the paramagnet.

# %%
for h_x, h_z in ((0.2, 0.0), (2.0, 0.0), (2.0, 0.2)):
    vals = [ch.majority_indicator_exact(ch.ising_ground_state(L, h_x, h_z)) for L in (8, 10, 12)]
    print(f"h_x = {h_x}, h_z = {h_z}: " + "  ".join(f"{v:.4f}" for v in vals))

# %% [markdown]
# Cluster chain: two-stage ring decoding of the stabilizer charges on each
# sublattice, scored by agreement between the full and the folded subsystem.

# %%
for delta in (0.2, 0.5, 0.8):
    mean, err = ch.spt_subsystem_indicator(delta, 12, 6, 2000, seed=3)
    print(f"delta = {delta}: agreement {mean:.3f} +- {err:.3f}")
