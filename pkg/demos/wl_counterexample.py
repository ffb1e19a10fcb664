"""Two colored circulants that colour refinement cannot separate, even after
recoloring by automorphism orbits, next to a pair that cycle counts do split."""

from graphpse import PseConfig, all_pse, augment_batch, distinguishable, fig1_graphs, orbit_partition
from graphpse.experiments import verify_thm2

f = fig1_graphs()
print("hexagon vs two triangles, plain WL distinguishes:", distinguishable(f["a"], f["b"]))
pair = [f["a"], f["b"]]
colors = augment_batch(pair, [all_pse(g, PseConfig(cycle=3)) for g in pair])
print("with 3-cycle counts:", distinguishable(*pair, *colors))

for key in "cd":
    orb = orbit_partition(f[key])
    print(f"circulant {key}: {len(set(orb.orbits))} orbit(s), |Aut| = {orb.automorphism_count}")
print("circulants, plain WL distinguishes:", distinguishable(f["c"], f["d"]))

verdict = verify_thm2()
print("\nfull verdict:", verdict["verdict"])
