from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qaoa_kit.graphs import (
    Graph,
    complete_graph,
    cycle_graph,
    greedy_coloring,
    kn_edge_coloring,
    misra_gries_edge_coloring,
    path_graph,
    random_graph,
)


@st.composite
def graphs(draw, max_n=8):
    n = draw(st.integers(2, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph(n, tuple(p for p, k in zip(pairs, keep) if k))


def test_constructors():
    assert complete_graph(4).m == 6
    assert cycle_graph(5).m == 5
    assert path_graph(4).edges == ((0, 1), (1, 2), (2, 3))
    assert complete_graph(4).max_degree == 3


@pytest.mark.parametrize("edges", [((0, 0),), ((0, 5),), ((0, 1), (1, 0))])
def test_rejects_bad_edges(edges):
    with pytest.raises(ValueError):
        Graph(3, edges)


def test_directed_edges_keep_order():
    g = Graph(3, ((2, 0), (0, 2)), directed=True)
    assert g.edges == ((2, 0), (0, 2))


def test_complement_and_line_graph():
    g = path_graph(3)
    assert set(g.complement().edges) == {(0, 2)}
    lg = g.line_graph()
    assert lg.n == 2 and lg.edges == ((0, 1),)


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_misra_gries_proper_within_delta_plus_one(g):
    col = misra_gries_edge_coloring(g)
    assert set(col) == set(g.edges)
    assert not col or max(col.values()) <= g.max_degree
    for v in range(g.n):
        seen = [c for e, c in col.items() if v in e]
        assert len(seen) == len(set(seen))


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_greedy_vertex_coloring_proper(g):
    c = greedy_coloring(g)
    assert all(c[u] != c[v] for u, v in g.edges)
    assert max(c) <= g.max_degree


@pytest.mark.parametrize("n", range(2, 13))
def test_kn_edge_coloring_is_round_robin(n):
    parts = kn_edge_coloring(n)
    assert len(parts) == (n - 1 if n % 2 == 0 else n)
    flat = sorted(e for p in parts for e in p)
    assert flat == list(itertools.combinations(range(n), 2))
    for p in parts:
        vs = [v for e in p for v in e]
        assert len(vs) == len(set(vs))


def test_random_graph_is_seeded():
    a = random_graph(6, 0.5, np.random.default_rng(4))
    b = random_graph(6, 0.5, np.random.default_rng(4))
    assert a == b and a.m >= 1
