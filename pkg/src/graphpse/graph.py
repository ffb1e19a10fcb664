"""Immutable undirected graphs and the dense matrices derived from them."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    IndexOutOfRange,
    NotABijection,
    SelfLoop,
    VirtualNodeAlreadyPresent,
)

Edge = tuple[int, int]


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on nodes ``0..num_nodes-1``.

    Edges are stored once per unordered pair as ``(u, v)`` with ``u < v``,
    sorted lexicographically. Use :func:`build_graph` rather than calling the
    constructor directly; it validates and canonicalizes the edge list.
    """

    num_nodes: int
    edges: tuple[Edge, ...]
    node_labels: tuple[int, ...] | None = None
    virtual_node: int | None = None

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(x)) for x in nbrs)

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.array([len(x) for x in self.neighbors], dtype=np.int64)
        deg.setflags(write=False)
        return deg

    def adjacency(self) -> np.ndarray:
        """Dense 0/1 adjacency matrix (float64, fresh copy)."""
        m = np.zeros((self.num_nodes, self.num_nodes))
        if self.edges:
            e = np.asarray(self.edges)
            m[e[:, 0], e[:, 1]] = 1.0
            m[e[:, 1], e[:, 0]] = 1.0
        return m

    def labels_or_zero(self) -> list[int]:
        if self.node_labels is None:
            return [0] * self.num_nodes
        return list(self.node_labels)


def build_graph(
    num_nodes: int,
    edge_list: Iterable[Sequence[int]],
    node_labels: Sequence[int] | None = None,
    virtual_node: int | None = None,
) -> Graph:
    """Validate and canonicalize an edge list.

    Pairs may appear in either orientation and more than once; duplicates are
    collapsed. Self-loops raise :class:`SelfLoop`, out-of-range endpoints raise
    :class:`IndexOutOfRange`.
    """
    n = int(num_nodes)
    if n < 0:
        raise IndexOutOfRange(f"num_nodes must be non-negative, got {num_nodes}")
    canon = set()
    for pair in edge_list:
        if len(pair) != 2:
            raise IndexOutOfRange(f"edge {pair!r} is not a pair")
        u, v = int(pair[0]), int(pair[1])
        if not (0 <= u < n and 0 <= v < n):
            raise IndexOutOfRange(f"edge ({u}, {v}) out of range for {n} nodes")
        if u == v:
            raise SelfLoop(f"self-loop at node {u}")
        canon.add((u, v) if u < v else (v, u))
    labels = None
    if node_labels is not None:
        labels = tuple(int(x) for x in node_labels)
        if len(labels) != n:
            raise IndexOutOfRange(f"{len(labels)} node labels for {n} nodes")
    if virtual_node is not None and not 0 <= virtual_node < n:
        raise IndexOutOfRange(f"virtual node {virtual_node} out of range")
    g = Graph(n, tuple(sorted(canon)), labels, virtual_node)
    if virtual_node is not None:
        if len(g.neighbors[virtual_node]) != n - 1:
            raise IndexOutOfRange("virtual node must be adjacent to every other node")
    return g


def laplacian(g: Graph) -> np.ndarray:
    """Combinatorial Laplacian ``D - M``."""
    m = g.adjacency()
    return np.diag(m.sum(axis=1)) - m


def random_walk_matrix(g: Graph) -> np.ndarray:
    """Row-normalized adjacency ``D^+ M``; isolated nodes get all-zero rows."""
    m = g.adjacency()
    deg = m.sum(axis=1)
    inv = np.divide(1.0, deg, out=np.zeros_like(deg), where=deg > 0)
    return m * inv[:, None]


def permute(g: Graph, perm: Sequence[int]) -> Graph:
    """Relabel nodes so that old node ``v`` becomes ``perm[v]``."""
    p = [int(x) for x in perm]
    if len(p) != g.num_nodes or sorted(p) != list(range(g.num_nodes)):
        raise NotABijection(f"{perm!r} is not a permutation of range({g.num_nodes})")
    labels = None
    if g.node_labels is not None:
        new = [0] * g.num_nodes
        for v, lab in enumerate(g.node_labels):
            new[p[v]] = lab
        labels = new
    vn = None if g.virtual_node is None else p[g.virtual_node]
    return build_graph(g.num_nodes, [(p[u], p[v]) for u, v in g.edges], labels, vn)


def inverse_permutation(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return inv


def add_virtual_node(g: Graph) -> Graph:
    """Append one node joined to every existing node.

    If the graph carries labels, the new node gets a fresh label one above the
    current maximum.
    """
    if g.virtual_node is not None:
        raise VirtualNodeAlreadyPresent(f"graph already has virtual node {g.virtual_node}")
    n = g.num_nodes
    edges = list(g.edges) + [(v, n) for v in range(n)]
    labels = None
    if g.node_labels is not None:
        labels = list(g.node_labels) + [max(g.node_labels, default=-1) + 1]
    return build_graph(n + 1, edges, labels, virtual_node=n)


def drop_labels(g: Graph) -> Graph:
    return Graph(g.num_nodes, g.edges, None, g.virtual_node)


def with_labels(g: Graph, labels: Sequence[int]) -> Graph:
    return build_graph(g.num_nodes, g.edges, labels, g.virtual_node)


def disjoint_union(graphs: Sequence[Graph]) -> tuple[Graph, list[int]]:
    """Union with node offsets; returns the union and each graph's offset."""
    edges: list[Edge] = []
    labels: list[int] = []
    offsets = []
    off = 0
    for g in graphs:
        offsets.append(off)
        edges.extend((u + off, v + off) for u, v in g.edges)
        labels.extend(g.labels_or_zero())
        off += g.num_nodes
    any_labels = any(g.node_labels is not None for g in graphs)
    return build_graph(off, edges, labels if any_labels else None), offsets


def connected_components(g: Graph) -> list[list[int]]:
    """Components as sorted node lists, ordered by smallest member."""
    seen = [False] * g.num_nodes
    comps = []
    for s in range(g.num_nodes):
        if seen[s]:
            continue
        seen[s] = True
        stack, comp = [s], []
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in g.neighbors[u]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def induced_subgraph(g: Graph, nodes: Sequence[int]) -> Graph:
    index = {v: i for i, v in enumerate(nodes)}
    edges = [(index[u], index[v]) for u, v in g.edges if u in index and v in index]
    labels = None if g.node_labels is None else [g.node_labels[v] for v in nodes]
    return build_graph(len(nodes), edges, labels)


def cycle_graph(n: int) -> Graph:
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> Graph:
    return build_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def circulant_graph(n: int, jumps: Iterable[int]) -> Graph:
    return build_graph(n, [(i, (i + j) % n) for i in range(n) for j in jumps])


def erdos_renyi(n: int, p: float, rng: np.random.Generator) -> Graph:
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return build_graph(n, zip(iu[keep].tolist(), ju[keep].tolist()))
