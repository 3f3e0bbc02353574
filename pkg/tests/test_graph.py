import itertools

import networkx as nx
import numpy as np
import pytest

from graph.digraph import Digraph, generate_digraph, is_strongly_connected, matrix_roots
from graph.io import read_edge_list, read_matrix_csv, write_edge_list, write_matrix_csv
from graph.mixing import (
    ConvergenceError,
    build_mixing_pair,
    check_assumption_one,
    left_perron_vector,
    mixing_pair_from_matrices,
    right_perron_vector,
)
from graph.spectral import suggest_norm_constants


def test_single_node_graph_has_only_self_loop():
    g = generate_digraph(1, 0.7, seed=5)
    assert g.edges == frozenset({(0, 0)})


def test_zero_probability_gives_ring_with_self_loops():
    g = generate_digraph(4, 0.0, seed=7)
    assert len(g.edges) == 8
    assert {(0, 1), (1, 2), (2, 3), (3, 0)} <= g.edges


def test_generation_is_deterministic():
    assert generate_digraph(12, 0.2, seed=9).edges == generate_digraph(12, 0.2, seed=9).edges


@pytest.mark.parametrize("seed", range(100))
def test_generated_graphs_pass_bfs_oracle(seed):
    g = generate_digraph(30, 0.1, seed=seed)
    oracle = nx.DiGraph()
    oracle.add_nodes_from(range(g.n))
    oracle.add_edges_from(g.edges)
    assert nx.is_strongly_connected(oracle)
    assert is_strongly_connected(g)


def test_invalid_probability_rejected():
    with pytest.raises(ValueError):
        generate_digraph(3, 1.5, seed=0)


def test_strict_construction_rejects_disconnected_graph():
    with pytest.raises(ValueError):
        Digraph.from_edges(3, [(0, 1)], strict=True)
    g = Digraph.from_edges(3, [(0, 1)], strict=False)
    assert not is_strongly_connected(g)


def test_complete_digraph_mixing_is_uniform():
    g = Digraph.from_edges(3, [(i, j) for i in range(3) for j in range(3)])
    pair = build_mixing_pair(g)
    np.testing.assert_allclose(pair.R, np.full((3, 3), 1 / 3))
    np.testing.assert_allclose(pair.C, np.full((3, 3), 1 / 3))
    np.testing.assert_allclose(pair.u_R, np.ones(3))
    np.testing.assert_allclose(pair.u_C, np.ones(3))

    report = check_assumption_one(pair)
    assert report.ok
    assert report.roots_R == report.roots_C == frozenset({0, 1, 2})
    assert report.overlap == pytest.approx(3.0)


def test_ring_rows_have_two_halves():
    pair = build_mixing_pair(generate_digraph(4, 0.0, seed=7))
    for row in pair.R:
        assert sorted(row[row > 0].tolist()) == [0.5, 0.5]
    np.testing.assert_allclose(pair.R.sum(axis=1), 1.0, atol=1e-12)


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_generated_pair_invariants(seed):
    g = generate_digraph(15, 0.15, seed=seed)
    pair = build_mixing_pair(g)
    ones = np.ones(15)
    assert np.abs(pair.R @ ones - ones).max() <= 1e-12
    assert np.abs(ones @ pair.C - ones).max() <= 1e-12
    assert np.abs(pair.u_R @ (pair.R - np.eye(15))).max() <= 1e-9
    assert np.abs((pair.C - np.eye(15)) @ pair.u_C).max() <= 1e-9
    assert pair.u_R.sum() == pytest.approx(15)
    assert pair.u_C.sum() == pytest.approx(15)
    assert pair.u_R @ pair.u_C > 0
    # Sparsity follows the edge set: R[i, j] > 0 only if j transmits to i
    for i, j in zip(*np.nonzero(pair.R)):
        assert (j, i) in g.edges
    for i, j in zip(*np.nonzero(pair.C)):
        assert (j, i) in g.edges


def test_pair_arrays_are_read_only(small_pair):
    with pytest.raises(ValueError):
        small_pair.R[0, 0] = 1.0


def test_two_node_single_transmitter_perron_vector():
    R = np.array([[1.0, 0.0], [0.5, 0.5]])
    np.testing.assert_allclose(left_perron_vector(R), [2.0, 0.0], atol=1e-10)
    assert matrix_roots(R) == {0}


def test_two_node_root_flag_matches_enumeration():
    R = np.array([[1.0, 0.0], [0.5, 0.5]])
    pair = mixing_pair_from_matrices(R, R.T)
    report = check_assumption_one(pair)
    assert set(report.roots_R) == matrix_roots(R)
    assert set(report.roots_C) == matrix_roots(R)
    assert report.intersection_nonempty == bool(matrix_roots(R) & matrix_roots(R))


def test_disjoint_root_sets_flagged():
    # R: only node 0 is heard by everyone. C: everyone pushes into node 2.
    R = np.array([[1.0, 0.0, 0.0], [0.5, 0.5, 0.0], [0.5, 0.0, 0.5]])
    C = np.array([[0.5, 0.0, 0.0], [0.0, 0.5, 0.0], [0.5, 0.5, 1.0]])
    pair = mixing_pair_from_matrices(R, C)
    report = check_assumption_one(pair)
    assert report.roots_R == frozenset({0})
    assert report.roots_C == frozenset({2})
    assert not report.intersection_nonempty
    assert not report.ok


def _rooted_pairs(n, edge_sets):
    for extra in edge_sets:
        g = Digraph.from_edges(n, extra, strict=False)
        A = g.adjacency()
        R = A / A.sum(axis=1, keepdims=True)
        C = A / A.sum(axis=0, keepdims=True)
        yield R, C


def _check_root_support(R, C):
    roots_R = matrix_roots(R)
    if roots_R:
        u = left_perron_vector(R)
        assert set(np.flatnonzero(u > 1e-9).tolist()) == roots_R
    roots_C = matrix_roots(C.T)
    if roots_C:
        u = right_perron_vector(C)
        assert set(np.flatnonzero(u > 1e-9).tolist()) == roots_C


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_root_sets_match_enumeration_exhaustive(n):
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    subsets = itertools.chain.from_iterable(itertools.combinations(pairs, r) for r in range(len(pairs) + 1))
    for R, C in _rooted_pairs(n, subsets):
        _check_root_support(R, C)


@pytest.mark.parametrize("n", [5, 6])
def test_root_sets_match_enumeration_sampled(n):
    rng = np.random.default_rng(n)
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    samples = []
    for _ in range(60):
        keep = rng.random(len(pairs)) < rng.uniform(0.1, 0.5)
        samples.append([e for e, k in zip(pairs, keep) if k])
    for R, C in _rooted_pairs(n, samples):
        _check_root_support(R, C)


def test_power_iteration_budget_exhaustion_raises():
    R = np.array([[1.0, 0.0], [0.5, 0.5]])
    with pytest.raises(ConvergenceError):
        left_perron_vector(R, max_iter=1)


def test_edge_list_and_matrix_round_trip(tmp_path):
    g = generate_digraph(6, 0.3, seed=4)
    write_edge_list(g, tmp_path / "g.txt")
    assert read_edge_list(tmp_path / "g.txt").edges == g.edges

    pair = build_mixing_pair(g)
    write_matrix_csv(pair.R, tmp_path / "R.csv")
    np.testing.assert_array_equal(read_matrix_csv(tmp_path / "R.csv"), pair.R)


def test_norm_constant_suggestion_is_in_range(small_pair):
    s = suggest_norm_constants(small_pair, 0.5, 0.5)
    assert 0 < s.theta_R <= 1
    assert 0 < s.theta_C <= 1
    assert s.delta_R2 >= 1
    assert s.delta_C2 >= 1
    assert 0 <= s.rho_R < 1
