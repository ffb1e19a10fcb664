"""Color refinement (1-WL), distinguishability, orbits and PSE-augmented colorings.

RELABEL is an exact dictionary. At each round the distinct signatures
``(old color, sorted neighbour colors)`` are sorted and numbered from 0.
Colors therefore depend only on the signatures, not on node order, and any
number of graphs refined as one disjoint union share a palette. Because
every signature contains the node's own previous color, each round refines
the one before it.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .encodings import PseVector
from .errors import GraphTooLarge, LengthMismatch, NotNodeLevel
from .graph import Graph, disjoint_union

ORBIT_NODE_LIMIT = 16
DEFAULT_QUANT = 6


@dataclass(frozen=True)
class WlPartition:
    colors: tuple[int, ...]
    iterations: int
    history: tuple[tuple[int, ...], ...]  # sorted class sizes per round, round 0 first

    @property
    def num_classes(self) -> int:
        return len(set(self.colors))


@dataclass(frozen=True)
class OrbitPartition:
    orbits: tuple[int, ...]
    automorphism_count: int

    @property
    def num_orbits(self) -> int:
        return len(set(self.orbits))


def canonical_colors(values: Sequence) -> list[int]:
    """Map arbitrary sortable values to ids ``0..k-1`` in sorted order."""
    palette = {v: i for i, v in enumerate(sorted(set(values)))}
    return [palette[v] for v in values]


def refine_step(neighbors: Sequence[Sequence[int]], colors: Sequence[int]) -> list[int]:
    sigs = [(colors[v], tuple(sorted(colors[u] for u in nb))) for v, nb in enumerate(neighbors)]
    return canonical_colors(sigs)


def _refine_rounds(neighbors, init):
    """All rounds up to stabilization: list of color lists, round 0 first."""
    colors = canonical_colors(init)
    rounds = [colors]
    k = len(set(colors))
    while True:
        nxt = refine_step(neighbors, colors)
        k2 = len(set(nxt))
        rounds.append(nxt)
        if k2 == k:
            return rounds
        colors, k = nxt, k2


def _class_sizes(colors) -> tuple[int, ...]:
    return tuple(sorted(Counter(colors).values()))


def color_refinement(g: Graph, init: Sequence | None = None) -> WlPartition:
    """Refine ``init`` (default: node labels, else uniform) until the class count stops growing.

    ``iterations`` is the first round whose class count equals the previous
    round's; ``colors`` is that round's coloring.
    """
    if init is None:
        init = g.labels_or_zero()
    if len(init) != g.num_nodes:
        raise LengthMismatch(f"{len(init)} initial colors for {g.num_nodes} nodes")
    rounds = _refine_rounds(g.neighbors, list(init))
    return WlPartition(
        colors=tuple(rounds[-1]),
        iterations=len(rounds) - 1,
        history=tuple(_class_sizes(c) for c in rounds),
    )


def _histograms(rounds, offsets, sizes):
    """Per graph, per round: sorted (color, count) pairs."""
    out = []
    for off, n in zip(offsets, sizes):
        out.append([tuple(sorted(Counter(c[off:off + n]).items())) for c in rounds])
    return out


@dataclass(frozen=True)
class BatchRefinement:
    """Refinement of several graphs run together on one palette."""

    rounds: int
    stable_colors: tuple[tuple[int, ...], ...]  # per graph
    class_sizes: tuple[tuple[int, ...], ...]  # per graph, stable round
    blocks: tuple[int, ...]  # per graph: id of its indistinguishability block

    def matrix(self) -> np.ndarray:
        """Boolean pairwise distinguishability matrix."""
        b = np.asarray(self.blocks)
        return b[:, None] != b[None, :]

    @property
    def num_blocks(self) -> int:
        return len(set(self.blocks))


def refine_batch(graphs: Sequence[Graph], inits: Sequence[Sequence] | None = None) -> BatchRefinement:
    """Refine a batch of graphs "in parallel" and group the indistinguishable ones.

    Two graphs fall in the same block iff their color histograms agree at
    the stable round. Histograms at a later round determine those at every
    earlier round, so this also covers all intermediate rounds.
    """
    union, offsets = disjoint_union(graphs)
    if inits is None:
        init = union.labels_or_zero()
    else:
        if len(inits) != len(graphs):
            raise LengthMismatch(f"{len(inits)} initial colorings for {len(graphs)} graphs")
        init = []
        for g, c in zip(graphs, inits):
            if len(c) != g.num_nodes:
                raise LengthMismatch(f"{len(c)} initial colors for {g.num_nodes} nodes")
            init.extend(c)
    rounds = _refine_rounds(union.neighbors, init)
    final = rounds[-1]
    sizes = [g.num_nodes for g in graphs]
    stable = [tuple(final[o:o + n]) for o, n in zip(offsets, sizes)]
    keys = [tuple(sorted(Counter(c).items())) for c in stable]
    blocks = canonical_colors(keys)
    return BatchRefinement(
        rounds=len(rounds) - 1,
        stable_colors=tuple(stable),
        class_sizes=tuple(_class_sizes(c) for c in stable),
        blocks=tuple(blocks),
    )


def distinguishable(g: Graph, h: Graph, init_g: Sequence | None = None, init_h: Sequence | None = None) -> tuple[bool, int | None]:
    """Whether color refinement tells ``g`` and ``h`` apart.

    Initial colors must come from a shared palette (equal values mean equal
    colors). Returns ``(True, t)`` with ``t`` the first round at which some
    color is used by a different number of nodes in the two graphs, or
    ``(False, None)``.
    """
    init_g = g.labels_or_zero() if init_g is None else list(init_g)
    init_h = h.labels_or_zero() if init_h is None else list(init_h)
    if len(init_g) != g.num_nodes or len(init_h) != h.num_nodes:
        raise LengthMismatch("initial coloring length does not match node count")
    union, offsets = disjoint_union([g, h])
    rounds = _refine_rounds(union.neighbors, init_g + init_h)
    hg, hh = _histograms(rounds, offsets, [g.num_nodes, h.num_nodes])
    for t, (a, b) in enumerate(zip(hg, hh)):
        if a != b:
            return True, t
    return False, None


# ------------------------------------------------------------------ orbits

class _Searcher:
    def __init__(self, g: Graph):
        self.n = g.num_nodes
        doubled, _ = disjoint_union([g, g])
        self.neighbors = doubled.neighbors
        self.adj = [set(nb) for nb in g.neighbors]
        self.labels = canonical_colors(g.labels_or_zero())

    def find(self, fixed: Sequence[tuple[int, int]]):
        """An automorphism mapping each ``a`` to ``b`` for ``(a, b)`` in ``fixed``."""
        cl = list(self.labels)
        cr = list(self.labels)
        fresh = max(cl, default=0) + 1
        for a, b in fixed:
            cl[a] = fresh
            cr[b] = fresh
            fresh += 1
        return _search(self.neighbors, self.adj, self.adj, self.n, cl, cr)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def absorb(self, perm):
        for v, w in enumerate(perm):
            self.union(v, w)


def _orbits_under(searcher: _Searcher, prefix: list[int], candidates_of) -> _UnionFind:
    """Orbits of the pointwise stabilizer of ``prefix``."""
    n = searcher.n
    uf = _UnionFind(n)
    fixed = [(b, b) for b in prefix]
    failed = set()
    for v in range(n):
        for w in candidates_of(v):
            if w <= v or uf.find(v) == uf.find(w) or (uf.find(v), uf.find(w)) in failed:
                continue
            perm = searcher.find(fixed + [(v, w)])
            if perm is None:
                failed.add((uf.find(v), uf.find(w)))
            else:
                uf.absorb(perm)
    return uf


def orbit_partition(g: Graph) -> OrbitPartition:
    """Exact automorphism orbits and group order by refinement-pruned backtracking.

    Orbits respect node labels. The group order is the product of basic
    orbit lengths along a stabilizer chain: fix a base point, count its
    orbit in the current stabilizer, and repeat until refinement of the
    individualized coloring is discrete.
    """
    n = g.num_nodes
    if n > ORBIT_NODE_LIMIT:
        raise GraphTooLarge(f"orbit search is limited to {ORBIT_NODE_LIMIT} nodes, got {n}")
    searcher = _Searcher(g)

    def stabilizer_cells(prefix):
        init = list(searcher.labels)
        fresh = max(init, default=0) + 1
        for i, b in enumerate(prefix):
            init[b] = fresh + i
        return _refine_rounds(g.neighbors, init)[-1]

    order = 1
    prefix: list[int] = []
    orbits = None
    while True:
        cells = stabilizer_cells(prefix)
        same = {}
        for v, c in enumerate(cells):
            same.setdefault(c, []).append(v)
        uf = _orbits_under(searcher, prefix, lambda v: same[cells[v]])
        if orbits is None:
            orbits = canonical_colors([uf.find(v) for v in range(n)])
        base = next((v for v in range(n) if len(same[cells[v]]) > 1), None)
        if base is None:
            break
        root = uf.find(base)
        order *= sum(1 for v in range(n) if uf.find(v) == root)
        prefix.append(base)
    return OrbitPartition(tuple(orbits or ()), order)


def find_isomorphism(g: Graph, h: Graph) -> list[int] | None:
    """A label-preserving isomorphism ``g -> h`` (``perm[v]`` is the image of ``v``) or ``None``."""
    if g.num_nodes != h.num_nodes or g.num_edges != h.num_edges:
        return None
    n = g.num_nodes
    union, _ = disjoint_union([g, h])
    labels = canonical_colors(g.labels_or_zero() + h.labels_or_zero())
    adj_g = [set(nb) for nb in g.neighbors]
    adj_h = [set(nb) for nb in h.neighbors]
    return _search(union.neighbors, adj_g, adj_h, n, labels[:n], labels[n:])


def _search(neighbors, adj_g, adj_h, n, cl, cr):
    """Backtracking for a color-preserving isomorphism between two graphs.

    ``neighbors`` is the adjacency of their disjoint union (left graph on
    ``0..n-1``, right graph on ``n..2n-1``). The joint coloring is refined;
    if it is not yet discrete, the first vertex of the smallest non-singleton
    cell is individualized against each candidate on the right in turn.
    Returns a list mapping left nodes to right nodes, or ``None``.
    """
    rounds = _refine_rounds(neighbors, list(cl) + list(cr))
    col = rounds[-1]
    left, right = col[:n], col[n:]
    if Counter(left) != Counter(right):
        return None
    cells = {}
    for v, c in enumerate(left):
        cells.setdefault(c, []).append(v)
    target = next((c for c, m in sorted(cells.items(), key=lambda kv: (len(kv[1]), kv[0])) if len(m) > 1), None)
    if target is None:
        where = {c: v for v, c in enumerate(right)}
        mapping = [where[c] for c in left]
        for u in range(n):
            for w in adj_g[u]:
                if mapping[w] not in adj_h[mapping[u]]:
                    return None
        return mapping
    x = cells[target][0]
    fresh = max(col) + 1
    for y in [v for v, c in enumerate(right) if c == target]:
        l2, r2 = list(left), list(right)
        l2[x] = fresh
        r2[y] = fresh
        found = _search(neighbors, adj_g, adj_h, n, l2, r2)
        if found is not None:
            return found
    return None


# ------------------------------------------------------- augmented colorings

def _pse_key(label, row, quant):
    # +0.0 folds negative zero into zero
    return (int(label), tuple(float(round(float(x), quant)) + 0.0 for x in row))


def augment_batch(graphs: Sequence[Graph], pses: Sequence[PseVector], quant: int = DEFAULT_QUANT) -> list[list[int]]:
    """Initial colors combining each node's label with its rounded PSE row.

    One palette covers the whole batch: equal ``(label, rounded row)`` pairs
    get equal colors in every graph. Graph-level PSEs are broadcast to all
    nodes of their graph.
    """
    if len(graphs) != len(pses):
        raise LengthMismatch(f"{len(pses)} encodings for {len(graphs)} graphs")
    keys = []
    for g, p in zip(graphs, pses):
        vals = p.values
        if p.level == "graph":
            vals = np.repeat(vals, g.num_nodes, axis=0)
        if vals.shape[0] != g.num_nodes:
            raise LengthMismatch(f"{vals.shape[0]} PSE rows for {g.num_nodes} nodes")
        keys.append([_pse_key(lab, row, quant) for lab, row in zip(g.labels_or_zero(), vals)])
    palette = {k: i for i, k in enumerate(sorted({k for ks in keys for k in ks}))}
    return [[palette[k] for k in ks] for ks in keys]


def augment_colors(g: Graph, pse: PseVector, quant: int = DEFAULT_QUANT, palette: dict | None = None) -> list[int]:
    """Single-graph form of :func:`augment_batch`.

    Pass the same ``palette`` dict across calls to keep colors consistent
    between graphs; new ``(label, row)`` keys get the next free integer.
    """
    if pse.level != "node":
        raise NotNodeLevel(f"{pse.kind} is {pse.level}-level; broadcast it or use augment_batch")
    if pse.values.shape[0] != g.num_nodes:
        raise LengthMismatch(f"{pse.values.shape[0]} PSE rows for {g.num_nodes} nodes")
    if palette is None:
        palette = {}
    out = []
    for lab, row in zip(g.labels_or_zero(), pse.values):
        key = _pse_key(lab, row, quant)
        if key not in palette:
            palette[key] = len(palette)
        out.append(palette[key])
    return out
