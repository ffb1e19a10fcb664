import itertools
import math

import numpy as np
import pytest
from hypothesis import given

from graphpse.datasets import fig1_graphs
from graphpse.encodings import PseVector, cycle_se, rwse
from graphpse.errors import GraphTooLarge, LengthMismatch, NotNodeLevel
from graphpse.graph import (
    Graph,
    build_graph,
    circulant_graph,
    complete_graph,
    cycle_graph,
    disjoint_union,
    path_graph,
    permute,
)
from graphpse.wl import (
    augment_batch,
    augment_colors,
    color_refinement,
    distinguishable,
    find_isomorphism,
    orbit_partition,
    refine_batch,
)

from conftest import graphs, graphs_with_perm


def _automorphisms(g):
    es = set(g.edges)
    labs = g.labels_or_zero()
    out = []
    for p in itertools.permutations(range(g.num_nodes)):
        if all(labs[p[v]] == labs[v] for v in range(g.num_nodes)) and all(
            (min(p[u], p[v]), max(p[u], p[v])) in es for u, v in g.edges
        ):
            out.append(p)
    return out


def _isomorphic(g, h):
    if g.num_nodes != h.num_nodes or g.num_edges != h.num_edges:
        return False
    target = set(h.edges)
    return any(
        all((min(p[u], p[v]), max(p[u], p[v])) in target for u, v in g.edges)
        for p in itertools.permutations(range(g.num_nodes))
    )


def test_refinement_examples():
    c6 = color_refinement(cycle_graph(6))
    assert c6.num_classes == 1 and c6.iterations == 1
    star = color_refinement(build_graph(4, [(0, 1), (0, 2), (0, 3)]))
    assert star.num_classes == 2 and star.colors[1] == star.colors[2] == star.colors[3]
    p4 = color_refinement(path_graph(4))
    assert p4.colors[0] == p4.colors[3] and p4.colors[1] == p4.colors[2] and p4.num_classes == 2
    with pytest.raises(LengthMismatch):
        color_refinement(path_graph(4), [0, 0])


def test_distinguishable_examples():
    figs = fig1_graphs()
    assert distinguishable(figs["a"], figs["b"]) == (False, None)
    assert distinguishable(figs["c"], figs["d"]) == (False, None)
    assert distinguishable(complete_graph(2), path_graph(3))[0]


def test_orbit_examples():
    c4 = orbit_partition(cycle_graph(4))
    assert c4.num_orbits == 1 and c4.automorphism_count == 8
    assert orbit_partition(path_graph(3)).orbits == (0, 1, 0)
    circ = fig1_graphs()["c"]
    assert orbit_partition(Graph(circ.num_nodes, circ.edges)).num_orbits == 1
    assert orbit_partition(build_graph(16, [])).automorphism_count == math.factorial(16)
    with pytest.raises(GraphTooLarge):
        orbit_partition(cycle_graph(17))


def test_orbits_respect_labels():
    g = build_graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)], node_labels=[1, 0, 0, 0])
    o = orbit_partition(g)
    assert o.orbits[1] == o.orbits[3] != o.orbits[2]
    assert o.automorphism_count == 2


@given(graphs(max_nodes=7))
def test_orbits_match_brute_force(g):
    autos = _automorphisms(g)
    res = orbit_partition(g)
    assert res.automorphism_count == len(autos)
    same = {(v, p[v]) for p in autos for v in range(g.num_nodes)}
    for v in range(g.num_nodes):
        for w in range(g.num_nodes):
            assert (res.orbits[v] == res.orbits[w]) == ((v, w) in same)
    stable = color_refinement(g).colors
    for v, w in same:
        assert stable[v] == stable[w] and g.degrees[v] == g.degrees[w]


@given(graphs(max_nodes=9))
def test_refinement_history_properties(g):
    res = color_refinement(g)
    counts = [len(h) for h in res.history]
    assert all(a < b for a, b in zip(counts[:-2], counts[1:-1]))
    assert counts[-1] == counts[-2]
    assert res.iterations <= max(1, g.num_nodes)
    assert sorted(set(res.colors)) == list(range(res.num_classes))


@given(graphs(max_nodes=7), graphs(max_nodes=7))
def test_distinguishable_symmetric_and_sound(g, h):
    a, _ = distinguishable(g, h)
    b, _ = distinguishable(h, g)
    assert a == b
    if _isomorphic(g, h):
        assert not a
        assert find_isomorphism(g, h) is not None
    else:
        assert find_isomorphism(g, h) is None


@given(graphs_with_perm(max_nodes=9))
def test_permuted_copy_indistinguishable(gp):
    g, p = gp
    h = permute(g, p)
    assert distinguishable(g, h) == (False, None)
    iso = find_isomorphism(g, h)
    assert iso is not None and all((min(iso[u], iso[v]), max(iso[u], iso[v])) in set(h.edges) for u, v in g.edges)


def test_batch_refinement_blocks():
    figs = fig1_graphs()
    res = refine_batch([figs["a"], figs["b"], path_graph(6)])
    assert res.blocks[0] == res.blocks[1] != res.blocks[2]
    assert res.matrix().tolist() == [[False, False, True], [False, False, True], [True, True, False]]


def test_augment_uniform_rows_keep_labels():
    g = build_graph(3, [(0, 1)], node_labels=[2, 2, 5])
    cols = augment_colors(g, PseVector("X", "node", np.ones((3, 2))))
    assert cols[0] == cols[1] != cols[2]
    with pytest.raises(NotNodeLevel):
        augment_colors(g, cycle_se(complete_graph(3), 3))


def test_augment_shared_palette():
    a, b = cycle_graph(6), disjoint_union([cycle_graph(3), cycle_graph(3)])[0]
    inits = augment_batch([a, b], [cycle_se(a, 3), cycle_se(b, 3)])
    assert set(inits[0]).isdisjoint(inits[1])
    assert refine_batch([a, b], inits).num_blocks == 2
    palette = {}
    ca = augment_colors(a, rwse(a, [2]), palette=palette)
    cb = augment_colors(cycle_graph(6), rwse(cycle_graph(6), [2]), palette=palette)
    assert ca == cb


def test_orbit_recoloring_keeps_circulant_pair_together():
    figs = fig1_graphs()
    c, d = figs["c"], figs["d"]
    orbits = orbit_partition(Graph(12, c.edges)).orbits
    pse = [PseVector("orbit", "node", np.array([[o] for o in orbits], dtype=float))] * 2
    inits = augment_batch([c, d], pse)
    assert refine_batch([c, d], inits).num_blocks == 1
    # a permutation-equivariant PSE cannot split them either
    inits = augment_batch([c, d], [rwse(c, range(1, 9)), rwse(d, range(1, 9))])
    assert refine_batch([c, d], inits).num_blocks == 1


def test_circulant_automorphisms():
    assert orbit_partition(circulant_graph(12, (1, 2))).automorphism_count == 24
    assert orbit_partition(complete_graph(6)).automorphism_count == 720
