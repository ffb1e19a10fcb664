"""Push random node features through a randomly initialised GPSE encoder and
decode them with one node head and one graph head."""

import numpy as np

from graphpse.encodings import rnf
from graphpse.graph import add_virtual_node, cycle_graph
from graphpse.mpnn import gpse_decode, gpse_encoder_forward, random_gpse_weights

w = random_gpse_weights(in_dim=20, inner_dim=32, num_layers=4, num_node_heads=1, num_graph_heads=1, rng=np.random.default_rng(0))
g = cycle_graph(8)
x = rnf(add_virtual_node(g), seed=0, graph_index=0).values
h = gpse_encoder_forward(g, x, w)
node_out, graph_out = gpse_decode(h, w.heads)
print("embedding shape:", h.shape)
print("node head:", np.round(node_out, 4))
print("graph head:", np.round(graph_out, 4))
