# %% [markdown]
# Class weights as random-bond Ising partition functions
#
# For the product state, kappa[m, q] equals a prefactor times the partition
# function of a random-bond Ising model whose frustrated bonds are a reference
# string with syndrome m in class q, at the coupling J = ln((1 - p) / p) / 2.

# %%
import math

from oneform import lattice as lt, qstate as qs, rbim

lat = lt.build_torus(3, 2)
theta = 0.15 * math.pi
p = math.sin(theta / 2) ** 2
J = rbim.nishimori_coupling(p)
table = qs.kappa_exact(qs.product_state(lat, theta), lat)
pref = 0.5 * lat.n_edges * math.log(p * (1 - p)) - math.log(2)

for syn in list(rbim.even_syndromes(lat))[:4]:
    m = qs.syndrome_mask(syn)
    lz = rbim.sector_log_partitions(lat, J, syn)
    for c, q in enumerate(lt.CLASSES):
        print(f"m={m:2d} q={q}  kappa={table.kappa(m, q):.3e}  from RBIM={math.exp(pref + lz[c]):.3e}")

# %% [markdown]
# Summing products of two such partition functions over all syndromes and
# classes collapses to a clean Ising model with twisted boundaries.

# %%
for rep in rbim.ising_twist_identities(lt.build_torus(2, 2), 0.5):
    print(rep["identity"], f"rel_err = {rep['rel_err']:.1e}")
