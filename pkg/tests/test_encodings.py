import math

import numpy as np
import pytest
from hypothesis import given

from graphpse.encodings import (
    ALLPSE_ORDER,
    PseConfig,
    PseVector,
    all_pse,
    compute_kinds,
    constant_features,
    count_cycles,
    cycle_se,
    elstatic_pe,
    normalize_per_graph,
    potential_matrix,
    rnf,
    rwse,
)
from graphpse.errors import DisconnectedGraph, EmptyConfig, KTooLarge, NotNodeLevel
from graphpse.graph import (
    build_graph,
    circulant_graph,
    complete_graph,
    connected_components,
    cycle_graph,
    disjoint_union,
    erdos_renyi,
    permute,
    random_walk_matrix,
)

from conftest import graphs, graphs_with_perm, permute_rows
from oracles import cycle_counts_by_subsets, lapack_potentials, monte_carlo_return


# RWSE -----------------------------------------------------------------------

def test_rwse_examples():
    np.testing.assert_array_equal(rwse(complete_graph(3), [2]).values, [[0.5]] * 3)
    np.testing.assert_array_equal(rwse(complete_graph(2), [2, 3]).values, [[1.0, 0.0]] * 2)


def test_rwse_isolated_node_is_zero():
    assert np.all(rwse(build_graph(3, [(0, 1)]), range(1, 6)).values[2] == 0)


def test_rwse_matches_monte_carlo():
    rng = np.random.default_rng(7)
    g = erdos_renyi(10, 0.3, rng)
    walks = 100_000
    for v in range(g.num_nodes):
        if g.degrees[v] == 0:
            continue
        p = rwse(g, [4]).values[v, 0]
        est = monte_carlo_return(g, v, 4, walks, rng)
        se = math.sqrt(p * (1 - p) / walks)
        assert abs(est - p) <= 3 * se if se > 0 else est == p


def test_rwse_large_lcm_uses_exact_integers():
    # degrees 1..12 make lcm**k overflow float53 quickly
    edges = [(0, j) for j in range(1, 13)] + [(i, j) for i in range(1, 13) for j in range(i + 1, 13) if (i * j) % 3 == 0]
    g = build_graph(13, edges)
    p = random_walk_matrix(g)
    ref = np.stack([np.diag(np.linalg.matrix_power(p, k)) for k in range(1, 11)], axis=1)
    np.testing.assert_allclose(rwse(g, range(1, 11)).values, ref, atol=1e-14)


@given(graphs())
def test_rwse_range_and_bipartite_parity(g):
    vals = rwse(g, range(1, 8)).values
    assert np.all((vals >= 0) & (vals <= 1))
    p = random_walk_matrix(g)
    ref = np.stack([np.diag(np.linalg.matrix_power(p, k)) for k in range(1, 8)], axis=1)
    np.testing.assert_allclose(vals, ref, atol=1e-12)


@given(graphs(max_nodes=8))
def test_rwse_odd_steps_vanish_on_bipartite(g):
    side = [-1] * g.num_nodes
    for comp in connected_components(g):
        side[comp[0]] = 0
        stack = [comp[0]]
        while stack:
            u = stack.pop()
            for w in g.neighbors[u]:
                if side[w] < 0:
                    side[w] = 1 - side[u]
                    stack.append(w)
                elif side[w] == side[u]:
                    return  # odd cycle: not bipartite
    assert np.all(rwse(g, [1, 3, 5, 7]).values == 0)


# ElstaticPE -------------------------------------------------------------------

def test_elstatic_k2():
    np.testing.assert_array_equal(elstatic_pe(complete_graph(2)).values, [[-0.5, -0.5, -0.5, 0, -0.5, -0.5, 0]] * 2)


def test_elstatic_transitive_graph_rows_equal():
    vals = elstatic_pe(circulant_graph(11, (1, 3))).values
    assert np.all(vals == vals[0])


def test_elstatic_disconnected():
    g = disjoint_union([complete_graph(2), complete_graph(3)])[0]
    with pytest.raises(DisconnectedGraph):
        elstatic_pe(g)
    per = elstatic_pe(g, per_component=True).values
    np.testing.assert_array_equal(per[:2], elstatic_pe(complete_graph(2)).values)
    np.testing.assert_array_equal(per[2:], elstatic_pe(complete_graph(3)).values)


@given(graphs(min_nodes=2, max_nodes=8))
def test_potentials_match_lapack(g):
    if len(connected_components(g)) != 1:
        return
    q = np.array(potential_matrix(g, "exact"), dtype=float)
    assert np.all(np.diag(q) == 0)
    ref = lapack_potentials(g)
    np.testing.assert_allclose(q, ref, atol=1e-10)
    np.testing.assert_allclose(elstatic_pe(g).values, elstatic_pe(g, method="spectral").values, atol=1e-10)


# CycleSE ----------------------------------------------------------------------

def test_cycle_examples():
    assert cycle_se(complete_graph(3), 4).values.tolist() == [[1, 0]]
    assert cycle_se(cycle_graph(6), 6).values.tolist() == [[0, 0, 0, 1]]
    two_triangles = disjoint_union([cycle_graph(3), cycle_graph(3)])[0]
    assert cycle_se(two_triangles, 3).values.tolist() == [[2]]
    assert count_cycles(complete_graph(5), 5) == [10, 15, 12]
    assert cycle_se(complete_graph(3)).level == "graph"


def test_cycle_bound():
    with pytest.raises(KTooLarge):
        cycle_se(complete_graph(3), 11)


@given(graphs(max_nodes=9))
def test_cycles_match_subset_oracle(g):
    assert count_cycles(g, 9) == cycle_counts_by_subsets(g.num_nodes, g.edges, 9)
    m = g.adjacency()
    assert count_cycles(g, 3)[0] == round(np.trace(m @ m @ m) / 6)


# RNF and constants ------------------------------------------------------------

def test_rnf_shape_and_determinism():
    g = cycle_graph(5)
    a, b = rnf(g, seed=3), rnf(g, seed=3)
    assert a.values.shape == (5, 20)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, rnf(g, seed=4).values)
    assert not np.array_equal(a.values, rnf(g, seed=3, graph_index=1).values)


def test_rnf_moments():
    x = rnf(build_graph(1000, []), seed=11).values
    assert np.all(np.abs(x.mean(axis=0)) <= 4 / math.sqrt(1000))
    sd = x.std(axis=0)
    assert np.all((sd >= 0.9) & (sd <= 1.1))


def test_constant_features():
    np.testing.assert_array_equal(constant_features(complete_graph(2), 2).values, [[1, 1], [1, 1]])
    assert constant_features(cycle_graph(4)).values.shape == rnf(cycle_graph(4)).values.shape


# AllPSE and normalization -------------------------------------------------------

def test_all_pse_examples():
    k2 = all_pse(complete_graph(2), PseConfig(lap_pe=1, rwse=(2,)))
    np.testing.assert_allclose(k2.values, [[math.sqrt(0.5), 1.0]] * 2, atol=1e-12)
    with pytest.raises(EmptyConfig):
        all_pse(complete_graph(2), PseConfig())
    tri = all_pse(complete_graph(3), PseConfig(cycle=3))
    assert tri.values.tolist() == [[1.0]] * 3


def test_all_pse_column_order_and_width():
    g = circulant_graph(9, (1, 2))
    cfg = PseConfig.full()
    kinds = compute_kinds(g, cfg)
    assert tuple(p.kind for p in kinds) == ALLPSE_ORDER
    assert all_pse(g, cfg).width == sum(p.width for p in kinds)


def test_config_round_trip():
    cfg = PseConfig.full()
    assert PseConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ValueError):
        PseConfig.from_dict({"bogus": 1})


def test_normalize_examples():
    p = PseVector("RWSE", "node", np.array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]]))
    out = normalize_per_graph(p).values
    np.testing.assert_allclose(out[:, 0], [-1.224744871391589, 0, 1.224744871391589])
    assert np.all(out[:, 1] == 0)
    with pytest.raises(NotNodeLevel):
        normalize_per_graph(cycle_se(complete_graph(3), 3))


@given(graphs(min_nodes=2, max_nodes=9))
def test_normalize_contract_and_idempotence(g):
    out = normalize_per_graph(rwse(g, range(1, 6))).values
    assert np.all(np.abs(out.mean(axis=0)) <= 1e-12)
    sd = out.std(axis=0)
    assert np.all((sd == 0) | (np.abs(sd - 1) <= 1e-12))
    again = normalize_per_graph(PseVector("RWSE", "node", out)).values
    np.testing.assert_allclose(again, out, atol=1e-12)


@given(graphs_with_perm(max_nodes=9))
def test_combinatorial_kinds_equivariant(gp):
    g, p = gp
    h = permute(g, p)
    assert np.array_equal(rwse(h).values, permute_rows(rwse(g).values, p))
    assert np.array_equal(cycle_se(h, 6).values, cycle_se(g, 6).values)
    if len(connected_components(g)) == 1:
        assert np.array_equal(elstatic_pe(h).values, permute_rows(elstatic_pe(g).values, p))
