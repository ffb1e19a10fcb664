"""Seeded generators for the synthetic expressivity benchmarks, and bundle statistics."""

from __future__ import annotations

import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Sequence

import networkx as nx
import numpy as np

from .encodings import graph_rng
from .errors import BadSkip, InfeasibleDegree, RetriesExhausted
from .graph import Graph, build_graph, circulant_graph, connected_components, cycle_graph, disjoint_union, laplacian, permute, with_labels

CSL_SKIPS = (2, 3, 4, 5, 6, 9, 11, 12, 13, 16)
CSL_NODES = 41
REGULAR_RETRIES = 10_000


@dataclass
class DatasetBundle:
    graphs: list[Graph]
    labels: list  # one int per graph, or one int list per graph for node-level tasks
    meta: dict = field(default_factory=dict)
    level: str = "graph"

    def __len__(self):
        return len(self.graphs)


# ------------------------------------------------------------------- CSL

def gen_csl(
    skips: Sequence[int] = CSL_SKIPS,
    copies_per_class: int = 15,
    seed: int = 0,
    num_nodes: int = CSL_NODES,
) -> DatasetBundle:
    """Circulant ``C_n(1, r)`` for each skip ``r``, each copy under a seeded random relabeling.

    Graph ``i`` of the bundle is permuted with stream ``(seed, i)``. Labels are
    the index of the skip in ``skips``.
    """
    skips = [int(r) for r in skips]
    if len(set(skips)) != len(skips):
        raise BadSkip(f"skips must be pairwise distinct, got {skips}")
    bad = [r for r in skips if not 2 <= r <= 20]
    if bad:
        raise BadSkip(f"skips must lie in [2, 20], got {bad}")
    if copies_per_class < 1:
        raise BadSkip("copies_per_class must be >= 1")
    graphs, labels = [], []
    for cls, r in enumerate(skips):
        base = circulant_graph(num_nodes, (1, r))
        for _ in range(copies_per_class):
            perm = graph_rng(seed, len(graphs)).permutation(num_nodes)
            graphs.append(permute(base, perm))
            labels.append(cls)
    meta = {
        "generator": "csl",
        "seed": seed,
        "skips": skips,
        "copies_per_class": copies_per_class,
        "num_nodes": num_nodes,
        "coprime_with_n": [math.gcd(r, num_nodes) == 1 for r in skips],
    }
    return DatasetBundle(graphs, labels, meta, "graph")


# ------------------------------------------------------- random regular

def _suitable(edges: set, pending: dict) -> bool:
    # can any two leftover stubs still be joined?
    if not pending:
        return True
    nodes = list(pending)
    for i, u in enumerate(nodes):
        for v in nodes[i + 1:]:
            if (min(u, v), max(u, v)) not in edges:
                return True
    return False


def _try_regular(n: int, d: int, rng: np.random.Generator) -> set | None:
    # shuffle the stubs, keep every valid pair, re-pair the leftovers
    edges: set = set()
    stubs = np.repeat(np.arange(n), d)
    while stubs.size:
        rng.shuffle(stubs)
        pending: dict = defaultdict(int)
        for s1, s2 in stubs.reshape(-1, 2).tolist():
            e = (s1, s2) if s1 < s2 else (s2, s1)
            if s1 != s2 and e not in edges:
                edges.add(e)
            else:
                pending[s1] += 1
                pending[s2] += 1
        if not _suitable(edges, pending):
            return None
        stubs = np.array([v for v, c in sorted(pending.items()) for _ in range(c)], dtype=np.int64)
    return edges


def random_regular_graph(n: int, d: int, rng: np.random.Generator, max_retries: int = REGULAR_RETRIES) -> tuple[Graph, int]:
    """One simple ``d``-regular graph and the number of attempts it took."""
    if d < 0 or n < 1 or d >= n or (n * d) % 2:
        raise InfeasibleDegree(f"no simple {d}-regular graph on {n} nodes")
    if d == 0:
        return build_graph(n, []), 1
    for attempt in range(1, max_retries + 1):
        edges = _try_regular(n, d, rng)
        if edges is not None:
            return build_graph(n, edges), attempt
    raise RetriesExhausted(f"no {d}-regular graph on {n} nodes after {max_retries} attempts")


def gen_regular(n: int, d: int, num_graphs: int, seed: int = 0, max_retries: int = REGULAR_RETRIES) -> DatasetBundle:
    """``num_graphs`` random simple ``d``-regular graphs; graph ``i`` uses stream ``(seed, i)``.

    Connectivity is not enforced; the meta records how many came out connected.
    """
    graphs, attempts = [], []
    for i in range(num_graphs):
        g, k = random_regular_graph(n, d, graph_rng(seed, i), max_retries)
        graphs.append(g)
        attempts.append(k)
    meta = {
        "generator": "regular",
        "seed": seed,
        "n": n,
        "d": d,
        "num_graphs": num_graphs,
        "connected": sum(len(connected_components(g)) == 1 for g in graphs),
        "max_attempts": max(attempts, default=0),
    }
    return DatasetBundle(graphs, [0] * num_graphs, meta, "graph")


def triangle_membership(g: Graph) -> list[int]:
    """1 for nodes on a triangle, from the diagonal of ``M^3``."""
    m = g.adjacency().astype(np.int64)
    diag = np.einsum("ij,jk,ki->i", m, m, m)
    return [int(x > 0) for x in diag]


def gen_tri(num_graphs: int = 1000, n: int = 20, seed: int = 0) -> DatasetBundle:
    """Random 3-regular graphs with node labels marking triangle membership."""
    base = gen_regular(n, 3, num_graphs, seed)
    labels = [triangle_membership(g) for g in base.graphs]
    meta = dict(base.meta, generator="tri")
    return DatasetBundle(base.graphs, labels, meta, "node")


# ------------------------------------------------------ hard-coded pairs

RED, BLACK = 1, 0


def fig1_graphs() -> dict[str, Graph]:
    """The hexagon/two-triangles pair and two red/black colorings of ``C_12(1, 2)``."""
    c12 = circulant_graph(12, (1, 2))
    red_c = {0, 1, 2, 6, 7, 8}
    return {
        "a": cycle_graph(6),
        "b": disjoint_union([cycle_graph(3), cycle_graph(3)])[0],
        "c": with_labels(c12, [RED if v in red_c else BLACK for v in range(12)]),
        "d": with_labels(c12, [RED if v % 2 else BLACK for v in range(12)]),
    }


# ------------------------------------------------------------ statistics

STATS_COLUMNS = (
    "num_nodes",
    "num_edges",
    "density",
    "vertex_connectivity",
    "algebraic_connectivity",
    "diameter",
    "max_clique",
    "centrality",
    "clustering",
    "triangles",
    "disconnected_fraction",
)


def _bfs_ecc(g: Graph, s: int) -> int:
    dist = {s: 0}
    q = deque([s])
    while q:
        u = q.popleft()
        for w in g.neighbors[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                q.append(w)
    return max(dist.values())


def diameter(g: Graph) -> tuple[int, bool]:
    """Diameter of the largest component (first one on ties) and whether ``g`` is disconnected."""
    comps = connected_components(g)
    if not comps:
        return 0, False
    big = max(comps, key=len)
    return max(_bfs_ecc(g, v) for v in big), len(comps) > 1


def triangle_count(g: Graph) -> int:
    m = g.adjacency().astype(np.int64)
    return int(np.trace(m @ m @ m)) // 6


def algebraic_connectivity(g: Graph) -> float:
    if g.num_nodes < 2:
        return 0.0
    return float(np.linalg.eigvalsh(laplacian(g))[1])


def _to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.num_nodes))
    h.add_edges_from(g.edges)
    return h


def graph_stats(g: Graph, columns: Sequence[str] = STATS_COLUMNS) -> dict[str, float]:
    n, m = g.num_nodes, g.num_edges
    out: dict[str, float] = {}
    h = _to_nx(g) if {"vertex_connectivity", "max_clique", "clustering"} & set(columns) else None
    for col in columns:
        if col == "num_nodes":
            out[col] = n
        elif col == "num_edges":
            out[col] = m
        elif col in ("density", "centrality"):
            # mean degree centrality is 2m / (n (n-1)), the same as density
            out[col] = 2.0 * m / (n * (n - 1)) if n > 1 else 0.0
        elif col == "vertex_connectivity":
            out[col] = nx.node_connectivity(h) if n > 1 else 0
        elif col == "algebraic_connectivity":
            out[col] = algebraic_connectivity(g)
        elif col == "diameter":
            out[col] = diameter(g)[0]
        elif col == "disconnected_fraction":
            out[col] = float(len(connected_components(g)) > 1)
        elif col == "max_clique":
            out[col] = len(nx.max_weight_clique(h, weight=None)[0]) if n else 0
        elif col == "clustering":
            out[col] = nx.average_clustering(h) if n else 0.0
        elif col == "triangles":
            out[col] = triangle_count(g)
        else:
            raise KeyError(f"unknown statistic {col!r}")
    return out


def dataset_stats(b: DatasetBundle, columns: Sequence[str] = STATS_COLUMNS, map_fn=map) -> dict[str, float]:
    """Per-bundle means of :func:`graph_stats`, in ``columns`` order."""
    columns = tuple(columns)
    if not b.graphs:
        return {c: 0.0 for c in columns}
    rows = list(map_fn(lambda g: graph_stats(g, columns), b.graphs))
    return {c: math.fsum(r[c] for r in rows) / len(rows) for c in columns}
