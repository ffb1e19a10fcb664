"""Positional and structural encodings (PSEs) and their combination.

Combinatorial encodings are computed exactly so that relabelling the nodes
permutes the output bit for bit:

* RWSE uses integer walk counts. With ``L = lcm(degrees)`` the matrix
  ``W = L * D^-1 M`` has integer entries and ``diag(P^k) = diag(W^k) / L^k``.
  Every entry of ``W^k`` is at most ``L^k``, so float64 products stay exact
  while ``L^k <= 2^53``. Past that bound Python integers take over.
* ElstaticPE uses the rational identity ``L^+ = n (nL + J)^-1 - J/n`` for
  connected graphs, and summarizes each row with exact arithmetic before
  rounding once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DisconnectedGraph, EmptyConfig, KTooLarge, NotNodeLevel
from .graph import Graph, connected_components, induced_subgraph, laplacian
from .spectral import EigenDecomposition, hk_diag_se, lap_eigenvalues, lap_pe, laplacian_eigh, pseudoinverse

NODE_KINDS = ("LapPE", "RWSE", "ElstaticPE", "HKdiagSE", "RNF", "AllPSE", "Constant")
GRAPH_KINDS = ("CycleSE", "LapEigval")
ALLPSE_ORDER = ("LapPE", "RWSE", "ElstaticPE", "HKdiagSE", "CycleSE", "LapEigval")

ELSTATIC_STATS = (
    "min_all", "max_all", "mean_all", "std_all",
    "min_nbr", "mean_nbr", "std_nbr",
)
MAX_CYCLE_LENGTH = 10
RNF_DIM = 20


@dataclass(frozen=True)
class PseVector:
    kind: str
    level: str  # "node" or "graph"
    values: np.ndarray
    params: dict = field(default_factory=dict)

    @property
    def width(self) -> int:
        return self.values.shape[1]


def _node(kind, values, **params):
    return PseVector(kind, "node", np.asarray(values, dtype=float), params)


def _graph(kind, values, **params):
    return PseVector(kind, "graph", np.asarray(values, dtype=float).reshape(1, -1), params)


# --------------------------------------------------------------------- RWSE

def _walk_weights(g: Graph) -> tuple[np.ndarray, int]:
    deg = g.degrees
    pos = deg[deg > 0]
    lcm = math.lcm(*pos.tolist()) if pos.size else 1
    w = np.zeros((g.num_nodes, g.num_nodes), dtype=np.int64)
    for u, v in g.edges:
        w[u, v] = lcm // deg[u]
        w[v, u] = lcm // deg[v]
    return w, lcm


def return_probabilities(g: Graph, steps: Sequence[int]) -> np.ndarray:
    """``diag(P^k)`` for each ``k`` in ``steps``, as an ``(n, len(steps))`` array."""
    steps = [int(k) for k in steps]
    if not steps:
        raise ValueError("steps must be non-empty")
    if min(steps) < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    n = g.num_nodes
    kmax = max(steps)
    w, lcm = _walk_weights(g)
    out = np.zeros((n, len(steps)))
    if n == 0:
        return out
    wanted = {k: [j for j, s in enumerate(steps) if s == k] for k in set(steps)}
    exact_float = lcm ** kmax <= 2 ** 53
    if exact_float:
        wf = w.astype(float)
        q = np.eye(n)
        for k in range(1, kmax + 1):
            q = q @ wf
            if k in wanted:
                col = np.diag(q) / float(lcm ** k)
                for j in wanted[k]:
                    out[:, j] = col
    else:
        wo = w.astype(object)
        q = np.identity(n, dtype=object)
        for k in range(1, kmax + 1):
            q = q.dot(wo)
            if k in wanted:
                denom = lcm ** k
                col = [float(Fraction(int(q[v, v]), denom)) for v in range(n)]
                for j in wanted[k]:
                    out[:, j] = col
    return out


def rwse(g: Graph, steps: Sequence[int] = tuple(range(1, 9))) -> PseVector:
    steps = tuple(int(k) for k in steps)
    return _node("RWSE", return_probabilities(g, steps), steps=list(steps))


# --------------------------------------------------------------- ElstaticPE

def _exact_pinv(g: Graph) -> list[list[Fraction]]:
    """Exact Laplacian pseudoinverse of a connected graph."""
    n = g.num_nodes
    deg = g.degrees
    # a = n*L + J, augmented with the identity; Gauss-Jordan over Fractions
    a = [[Fraction(1)] * n + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for i in range(n):
        a[i][i] += n * int(deg[i])
        for j in g.neighbors[i]:
            a[i][j] -= n
    for c in range(n):
        piv = next(r for r in range(c, n) if a[r][c] != 0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        row = [x * inv for x in a[c]]
        a[c] = row
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                ar = a[r]
                a[r] = [x - f * y for x, y in zip(ar, row)]
    nn = Fraction(1, n)
    return [[n * a[i][n + j] - nn for j in range(n)] for i in range(n)]


def _stats(vals: list) -> tuple[float, float, float, float]:
    if not vals:
        return 0.0, 0.0, 0.0, 0.0
    mean = sum(vals, Fraction(0)) / len(vals)
    var = sum(((x - mean) ** 2 for x in vals), Fraction(0)) / len(vals)
    return float(min(vals)), float(max(vals)), float(mean), math.sqrt(float(var))


def potential_matrix(g: Graph, method: str = "exact"):
    """``Q_ij = L^+_ij - L^+_ii``; exact Fractions or, with ``"spectral"``, floats."""
    if len(connected_components(g)) > 1:
        raise DisconnectedGraph("electrostatic potentials need a connected graph")
    if method == "exact":
        p = _exact_pinv(g)
        return [[p[i][j] - p[i][i] for j in range(g.num_nodes)] for i in range(g.num_nodes)]
    if method == "spectral":
        p = pseudoinverse(laplacian(g))
        return p - np.diag(p)[:, None]
    raise ValueError(f"unknown method {method!r}")


def _elstatic_connected(g: Graph, method: str) -> np.ndarray:
    n = g.num_nodes
    if method == "exact":
        q = potential_matrix(g, "exact")
    else:
        qf = potential_matrix(g, "spectral")
        q = [[Fraction(float(x)) for x in row] for row in qf]
    out = np.zeros((n, len(ELSTATIC_STATS)))
    for v in range(n):
        others = [q[v][j] for j in range(n) if j != v]
        nbrs = [q[v][j] for j in g.neighbors[v]]
        mn, mx, mean, std = _stats(others)
        nmin, _, nmean, nstd = _stats(nbrs)
        out[v] = (mn, mx, mean, std, nmin, nmean, nstd)
    return out


def elstatic_pe(g: Graph, per_component: bool = False, method: str = "exact") -> PseVector:
    """Per-node summary statistics of electrostatic potentials.

    Columns follow :data:`ELSTATIC_STATS`: min/max/mean/std over all other
    nodes, then min/mean/std over neighbours (population std). Disconnected
    graphs raise :class:`DisconnectedGraph` unless ``per_component`` is set,
    in which case each component is treated as its own graph.
    """
    comps = connected_components(g)
    if len(comps) <= 1:
        vals = _elstatic_connected(g, method) if g.num_nodes else np.zeros((0, 7))
    elif not per_component:
        raise DisconnectedGraph(f"graph has {len(comps)} components")
    else:
        vals = np.zeros((g.num_nodes, len(ELSTATIC_STATS)))
        for comp in comps:
            vals[comp] = _elstatic_connected(induced_subgraph(g, comp), method)
    return _node("ElstaticPE", vals, stats=list(ELSTATIC_STATS), method=method)


# ------------------------------------------------------------------ CycleSE

def count_cycles(g: Graph, k_max: int) -> list[int]:
    """Numbers of simple cycles of length ``3..k_max``.

    Each cycle is found from its smallest vertex, walking only through larger
    vertices, once in each direction; the halved tally counts it once.
    """
    if k_max > MAX_CYCLE_LENGTH:
        raise KTooLarge(f"k_max={k_max} exceeds the enumeration bound {MAX_CYCLE_LENGTH}")
    if k_max < 3:
        raise ValueError(f"k_max must be >= 3, got {k_max}")
    nbrs = g.neighbors
    counts = [0] * (k_max + 1)
    for s in range(g.num_nodes):
        on_path = [False] * g.num_nodes
        on_path[s] = True
        # iterative DFS: stack of (node, depth, neighbour iterator)
        stack = [(s, 1, iter(nbrs[s]))]
        while stack:
            u, depth, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                if u != s:
                    on_path[u] = False
                continue
            if nxt == s:
                if depth >= 3:
                    counts[depth] += 1
                continue
            if nxt < s or on_path[nxt] or depth == k_max:
                continue
            on_path[nxt] = True
            stack.append((nxt, depth + 1, iter(nbrs[nxt])))
    return [c // 2 for c in counts[3:]]


def cycle_se(g: Graph, k_max: int = 8) -> PseVector:
    return _graph("CycleSE", count_cycles(g, k_max), k=list(range(3, k_max + 1)))


# ------------------------------------------------------- random and constant

def graph_rng(seed: int, graph_index: int = 0) -> np.random.Generator:
    """Per-graph PCG64 stream keyed on ``(seed, graph_index)``.

    The stream depends only on the pair, never on scheduling, so batches can
    be generated in any order or in parallel.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(graph_index)])))


def rnf(g: Graph, dim: int = RNF_DIM, seed: int = 0, graph_index: int = 0) -> PseVector:
    """i.i.d. standard normal node features, one row per node."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    x = graph_rng(seed, graph_index).standard_normal((g.num_nodes, dim))
    return _node("RNF", x, dim=dim, seed=seed, graph_index=graph_index)


def constant_features(g: Graph, dim: int = RNF_DIM) -> PseVector:
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return _node("Constant", np.ones((g.num_nodes, dim)), dim=dim)


# ---------------------------------------------------------- spectral kinds

def lap_pe_vector(g: Graph, m: int = 4, decomposition: EigenDecomposition | None = None) -> PseVector:
    return _node("LapPE", lap_pe(g, m, decomposition), m=m)


def lap_eigval_vector(g: Graph, m: int = 4, decomposition: EigenDecomposition | None = None) -> PseVector:
    return _graph("LapEigval", lap_eigenvalues(g, m, decomposition), m=m)


def hk_diag_vector(g: Graph, times=(0.5, 1.0, 2.0, 4.0), decomposition: EigenDecomposition | None = None) -> PseVector:
    times = [float(t) for t in times]
    return _node("HKdiagSE", hk_diag_se(g, times, decomposition), times=times)


# ------------------------------------------------------------------ AllPSE

@dataclass
class PseConfig:
    """Which encodings to compute, with their parameters. ``None`` disables a kind."""

    lap_pe: int | None = None
    rwse: tuple[int, ...] | None = None
    elstatic: bool = False
    hk_diag: tuple[float, ...] | None = None
    cycle: int | None = None
    lap_eigval: int | None = None
    elstatic_per_component: bool = False

    @classmethod
    def full(cls) -> "PseConfig":
        """Every kind, at the package defaults."""
        return cls(
            lap_pe=4,
            rwse=tuple(range(1, 9)),
            elstatic=True,
            hk_diag=(0.5, 1.0, 2.0, 4.0),
            cycle=8,
            lap_eigval=4,
        )

    @classmethod
    def from_dict(cls, d: dict) -> "PseConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown PSE config keys: {sorted(unknown)}")
        d = dict(d)
        for key in ("rwse", "hk_diag"):
            if d.get(key) is not None:
                d[key] = tuple(d[key])
        return cls(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("rwse", "hk_diag"):
            if d[key] is not None:
                d[key] = list(d[key])
        return d

    def is_empty(self) -> bool:
        return not (self.lap_pe or self.rwse or self.elstatic or self.hk_diag or self.cycle or self.lap_eigval)


def compute_kinds(g: Graph, config: PseConfig) -> list[PseVector]:
    """Each enabled kind, separately, in the fixed AllPSE column order."""
    if config.is_empty():
        raise EmptyConfig("PSE config enables no encodings")
    ed = None
    if config.lap_pe or config.hk_diag or config.lap_eigval:
        ed = laplacian_eigh(g)
    out = []
    if config.lap_pe:
        out.append(lap_pe_vector(g, config.lap_pe, ed))
    if config.rwse:
        out.append(rwse(g, config.rwse))
    if config.elstatic:
        out.append(elstatic_pe(g, per_component=config.elstatic_per_component))
    if config.hk_diag:
        out.append(hk_diag_vector(g, config.hk_diag, ed))
    if config.cycle:
        out.append(cycle_se(g, config.cycle))
    if config.lap_eigval:
        out.append(lap_eigval_vector(g, config.lap_eigval, ed))
    return out


def all_pse(g: Graph, config: PseConfig | None = None) -> PseVector:
    """Column-wise concatenation of the enabled kinds; graph-level kinds are broadcast to every node."""
    config = config or PseConfig.full()
    blocks = []
    for p in compute_kinds(g, config):
        vals = p.values
        if p.level == "graph":
            vals = np.repeat(vals, g.num_nodes, axis=0)
        blocks.append(vals)
    return _node("AllPSE", np.hstack(blocks), **config.to_dict())


def normalize_per_graph(p: PseVector) -> PseVector:
    """Standardize each column to zero mean, unit (population) std; constant columns become 0."""
    if p.level != "node":
        raise NotNodeLevel(f"{p.kind} is {p.level}-level")
    x = p.values
    mean = x.mean(axis=0)
    centered = x - mean
    std = np.sqrt((centered ** 2).mean(axis=0))
    flat = std <= 1e-12 * np.maximum(1.0, np.abs(mean))
    out = np.where(flat, 0.0, centered / np.where(flat, 1.0, std))
    return PseVector(p.kind, "node", out, {**p.params, "normalized": True})
