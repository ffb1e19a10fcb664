"""Graph positional/structural encodings, color refinement and MPNN forward passes in numpy."""

from .datasets import DatasetBundle, dataset_stats, fig1_graphs, gen_csl, gen_regular, gen_tri
from .encodings import (
    PseConfig,
    PseVector,
    all_pse,
    compute_kinds,
    cycle_se,
    elstatic_pe,
    hk_diag_vector,
    lap_eigval_vector,
    lap_pe_vector,
    normalize_per_graph,
    rnf,
    rwse,
)
from .errors import GraphPSEError, VerdictFailed
from .graph import Graph, add_virtual_node, build_graph, laplacian, permute, random_walk_matrix
from .io import parse_jsonl, serialize_jsonl
from .mpnn import gatedgcn_layer, gin_layer, gpse_decode, gpse_encoder_forward, thm1_construct, thm1_verify
from .spectral import eigh, hk_diag_se, lap_eigenvalues, lap_pe, pseudoinverse
from .wl import augment_batch, augment_colors, color_refinement, distinguishable, orbit_partition, refine_batch

__version__ = "0.1.0"

__all__ = [
    "DatasetBundle",
    "Graph",
    "GraphPSEError",
    "PseConfig",
    "PseVector",
    "VerdictFailed",
    "add_virtual_node",
    "all_pse",
    "augment_batch",
    "augment_colors",
    "build_graph",
    "color_refinement",
    "compute_kinds",
    "cycle_se",
    "dataset_stats",
    "distinguishable",
    "eigh",
    "elstatic_pe",
    "fig1_graphs",
    "gatedgcn_layer",
    "gen_csl",
    "gen_regular",
    "gen_tri",
    "gin_layer",
    "gpse_decode",
    "gpse_encoder_forward",
    "hk_diag_se",
    "hk_diag_vector",
    "lap_eigenvalues",
    "lap_eigval_vector",
    "lap_pe",
    "lap_pe_vector",
    "laplacian",
    "normalize_per_graph",
    "orbit_partition",
    "parse_jsonl",
    "permute",
    "pseudoinverse",
    "random_walk_matrix",
    "refine_batch",
    "rnf",
    "rwse",
    "serialize_jsonl",
    "thm1_construct",
    "thm1_verify",
]
