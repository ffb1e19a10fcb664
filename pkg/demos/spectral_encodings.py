"""Walk through the encodings on a small graph: a 6-cycle with one chord."""

import numpy as np

from graphpse import PseConfig, build_graph, compute_kinds, eigh, laplacian

g = build_graph(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)])
ed = eigh(laplacian(g))
print("laplacian spectrum:", np.round(ed.eigenvalues, 4))

np.set_printoptions(precision=4, suppress=True)
for pse in compute_kinds(g, PseConfig.full()):
    print(f"\n{pse.kind} ({pse.level}-level), shape {pse.values.shape}")
    print(pse.values)
