from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from projcons import (
    EnumerationLimitError,
    WeightedDigraph,
    enumerate_max_in_forests,
    forest_matrix,
    has_spanning_in_tree,
    random_digraph,
    strongly_connected_components,
)
from conftest import SEVEN_AGENT_A

digraphs = st.builds(
    lambda n, seed, dens: random_digraph(n, density=dens, rng=seed),
    st.integers(1, 7), st.integers(0, 2**32 - 1), st.sampled_from([0.15, 0.3, 0.5]),
)


def test_rejects_bad_arcs():
    with pytest.raises(ValueError):
        WeightedDigraph(2, ((0, 0, 1),))
    with pytest.raises(ValueError):
        WeightedDigraph(2, ((0, 1, 1), (0, 1, 2)))
    with pytest.raises(ValueError):
        WeightedDigraph(2, ((0, 1, 0),))
    with pytest.raises(ValueError):
        WeightedDigraph(2, ((0, 2, 1),))


def test_matrix_round_trip():
    g = WeightedDigraph.from_matrix(np.array(SEVEN_AGENT_A))
    assert g.n == 7 and len(g.arcs) == 11
    assert (g.to_matrix() == np.array(SEVEN_AGENT_A)).all()
    assert g.successors(5) == [1, 2, 6]


def test_seven_components():
    st_ = strongly_connected_components(WeightedDigraph.from_matrix(np.array(SEVEN_AGENT_A)))
    assert st_.components == ((0, 1, 2), (3, 4), (5, 6))
    assert st_.final_classes == ((0, 1, 2), (3, 4))
    assert st_.d == 2


@given(digraphs)
@settings(max_examples=80, deadline=None)
def test_components_match_networkx(g):
    G = nx.DiGraph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from((i, j) for i, j, _ in g.arcs)
    ref = {frozenset(c) for c in nx.strongly_connected_components(G)}
    s = strongly_connected_components(g)
    assert {frozenset(c) for c in s.components} == ref
    C = nx.condensation(G)
    sinks = {frozenset(C.nodes[v]["members"]) for v in C if C.out_degree(v) == 0}
    assert {frozenset(c) for c in s.final_classes} == sinks
    assert has_spanning_in_tree(g) == (len(sinks) == 1)


@given(digraphs)
@settings(max_examples=60, deadline=None)
def test_forests_are_maximum_in_forests(g):
    d = strongly_connected_components(g).d
    forests = enumerate_max_in_forests(g)
    assert forests
    keys = set()
    for f in forests:
        assert len(f.arcs) == g.n - d
        assert f.n_trees == d
        out = [i for i, _ in f.arcs]
        assert len(out) == len(set(out))
        T = nx.DiGraph()
        T.add_nodes_from(range(g.n))
        T.add_edges_from(f.arcs)
        assert nx.is_directed_acyclic_graph(T)
        keys.add(tuple(sorted(f.arcs)))
    assert len(keys) == len(forests)


@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_total_weight_matches_matrix_tree_theorem(n, seed):
    # complete digraph: d = 1, in-tree weight rooted at s = det of L with row/col s removed
    rng = np.random.default_rng(seed)
    A = rng.integers(1, 4, (n, n)).astype(object)
    np.fill_diagonal(A, 0)
    g = WeightedDigraph.from_matrix(A)
    L = np.diag(A.sum(axis=1)) - A
    forests = enumerate_max_in_forests(g)
    total = sum(f.weight for f in forests)
    per_root = [round(np.linalg.det(np.delete(np.delete(L.astype(float), s, 0), s, 1)))
                for s in range(n)]
    assert total == sum(per_root)
    F = forest_matrix(g)
    for s in range(n):
        assert F[0, s] == Fraction(per_root[s], sum(per_root))


@given(digraphs)
@settings(max_examples=60, deadline=None)
def test_forest_matrix_is_row_stochastic(g):
    F = forest_matrix(g)
    assert all(sum(row) == 1 for row in F)
    assert all(x >= 0 for x in F.ravel())


def test_enumeration_limit():
    g = random_digraph(11, rng=0)
    with pytest.raises(EnumerationLimitError):
        enumerate_max_in_forests(g)
    assert forest_matrix(random_digraph(4, rng=1), max_vertices=4).shape == (4, 4)


def test_arcless_graph():
    g = WeightedDigraph(3, ())
    assert strongly_connected_components(g).d == 3
    assert (forest_matrix(g) == np.eye(3, dtype=int)).all()
