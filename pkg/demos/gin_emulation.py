"""Emulate a random GIN stack with gated graph convolutions and watch the
error shrink linearly with alpha."""

import numpy as np

from graphpse.graph import erdos_renyi
from graphpse.mpnn import random_gin_stack, thm1_verify

rng = np.random.default_rng(3)
g = erdos_renyi(10, 0.4, rng)
stack = random_gin_stack([3, 4, 3, 4, 2], rng)
h0 = rng.uniform(-1, 1, (10, 3))

print(f"{'alpha':>8} {'max error':>12} {'bound':>12}  ok")
for alpha in (0.5, 0.1, 0.01, 0.001):
    r = thm1_verify(g, h0, stack, alpha)
    print(f"{alpha:>8} {r.max_error:>12.3e} {r.bound:>12.3e}  {r.passed}")

# the same alpha at every layer compounds: error grows towards 1-(1-alpha)^L
lit = thm1_verify(g, h0, stack, 0.5, split=False)
print(f"\nunsplit alpha=0.5: error {lit.max_error:.3e}, bound {lit.bound:.3e}, ok {lit.passed}")
