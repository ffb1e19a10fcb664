import numpy as np
import pytest
from hypothesis import given

from graphpse.errors import IndexOutOfRange, NotABijection, SelfLoop, VirtualNodeAlreadyPresent
from graphpse.graph import (
    add_virtual_node,
    build_graph,
    complete_graph,
    connected_components,
    cycle_graph,
    disjoint_union,
    inverse_permutation,
    laplacian,
    path_graph,
    permute,
    random_walk_matrix,
)

from conftest import graphs, graphs_with_perm


def test_triangle_has_three_edges():
    g = build_graph(3, [(0, 1), (1, 2), (2, 0)])
    assert g.edges == ((0, 1), (0, 2), (1, 2))


def test_duplicate_edges_collapse():
    assert build_graph(2, [(0, 1), (1, 0)]).num_edges == 1


def test_self_loop_rejected():
    with pytest.raises(SelfLoop):
        build_graph(2, [(0, 0)])


def test_out_of_range_endpoint():
    with pytest.raises(IndexOutOfRange):
        build_graph(3, [(0, 5)])


def test_laplacian_small_cases():
    np.testing.assert_array_equal(laplacian(complete_graph(2)), [[1, -1], [-1, 1]])
    tri = laplacian(complete_graph(3))
    np.testing.assert_array_equal(np.diag(tri), [2, 2, 2])
    assert np.all(tri[~np.eye(3, dtype=bool)] == -1)
    np.testing.assert_array_equal(laplacian(build_graph(3, [])), np.zeros((3, 3)))


def test_random_walk_small_cases():
    p = random_walk_matrix(complete_graph(3))
    assert set(np.unique(p)) == {0.0, 0.5}
    np.testing.assert_array_equal(random_walk_matrix(complete_graph(2)), [[0, 1], [1, 0]])
    iso = random_walk_matrix(build_graph(3, [(0, 1)]))
    np.testing.assert_array_equal(iso[2], [0, 0, 0])


def test_permute_examples():
    tri = complete_graph(3)
    assert permute(tri, [1, 2, 0]).edges == tri.edges
    p3 = path_graph(3)
    assert permute(p3, [2, 1, 0]).edges == ((0, 1), (1, 2))
    assert permute(p3, [0, 1, 2]) == p3
    with pytest.raises(NotABijection):
        permute(p3, [0, 0, 1])


def test_permute_moves_labels():
    g = build_graph(3, [(0, 1)], node_labels=[5, 6, 7])
    assert permute(g, [2, 0, 1]).node_labels == (6, 7, 5)


def test_virtual_node_examples():
    k2 = add_virtual_node(complete_graph(2))
    assert k2.virtual_node == 2 and k2.edges == complete_graph(3).edges
    single = add_virtual_node(build_graph(1, []))
    assert single.virtual_node == 1 and single.num_edges == 1
    k4 = add_virtual_node(complete_graph(3))
    assert k4.edges == complete_graph(4).edges
    with pytest.raises(VirtualNodeAlreadyPresent):
        add_virtual_node(k4)


def test_virtual_node_gets_fresh_label():
    g = add_virtual_node(build_graph(2, [(0, 1)], node_labels=[0, 3]))
    assert g.node_labels == (0, 3, 4)


def test_disjoint_union_offsets():
    u, offs = disjoint_union([cycle_graph(3), path_graph(2)])
    assert offs == [0, 3]
    assert u.edges == ((0, 1), (0, 2), (1, 2), (3, 4))


@given(graphs())
def test_laplacian_rows_sum_to_zero(g):
    assert np.all(np.abs(laplacian(g).sum(axis=1)) <= 1e-12)


@given(graphs())
def test_walk_rows_are_stochastic(g):
    rows = random_walk_matrix(g).sum(axis=1)
    deg = g.degrees
    assert np.all(np.abs(rows[deg > 0] - 1.0) <= 1e-12)
    assert np.all(rows[deg == 0] == 0.0)


@given(graphs_with_perm())
def test_permute_round_trip(gp):
    g, p = gp
    assert permute(permute(g, p), inverse_permutation(p)) == g


@given(graphs())
def test_components_partition_nodes(g):
    comps = connected_components(g)
    assert sorted(v for c in comps for v in c) == list(range(g.num_nodes))
    where = {v: i for i, c in enumerate(comps) for v in c}
    assert all(where[u] == where[v] for u, v in g.edges)
