from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qaoa_kit import problems as P
from qaoa_kit.graphs import Graph, complete_graph, cycle_graph, path_graph


def test_maxcut_values():
    inst = P.MaxCut(complete_graph(3))
    assert inst.objective((0, 1, 1)) == 2
    assert P.brute_force_optimum(inst)[0] == 2
    w = P.MaxCut(Graph(2, ((0, 1),), (2.5,)))
    assert w.objective((1, 0)) == 2.5


def test_directed_maxcut_counts_forward_edges_only():
    inst = P.DirectedMaxCut(Graph(2, ((0, 1),), directed=True))
    assert inst.objective((1, 0)) == 1 and inst.objective((0, 1)) == 0


def test_sat_family():
    clauses = ((1, 2), (-1, 3), (-2, -3))
    assert P.MaxSat(3, clauses).objective((1, 0, 1)) == 3
    assert P.MaxSat(3, clauses).objective((1, 1, 0)) == 2
    assert P.MinSat(3, clauses).objective((0, 0, 0)) == 2
    assert P.MinSat(3, clauses).sense == P.MINIMIZE
    assert P.NaeSat(3, ((1, 2, 3),)).objective((1, 1, 1)) == 0
    assert P.NaeSat(3, ((1, 2, 3),)).objective((1, 0, 1)) == 1


def test_e3lin2():
    inst = P.E3Lin2(3, (((0, 1, 2), 1),))
    assert inst.objective((1, 0, 0)) == 1
    assert inst.objective((1, 1, 0)) == 0


def test_independent_set_feasibility():
    inst = P.MaxIndependentSet(path_graph(3))
    assert inst.is_feasible((1, 0, 1)) and not inst.is_feasible((1, 1, 0))
    assert P.brute_force_optimum(inst) == (2.0, [(1, 0, 1)])


def test_set_cover_and_packing():
    cover = P.MinSetCover(3, ((0, 1), (1, 2), (2,)))
    assert P.brute_force_optimum(cover)[0] == 2
    pack = P.MaxSetPacking(4, ((0, 1), (1, 2), (2, 3)))
    assert P.brute_force_optimum(pack)[0] == 2


def test_graph_partitioning_needs_balance():
    inst = P.GraphPartitioning(cycle_graph(4))
    assert not inst.is_feasible((1, 1, 1, 0))
    assert P.brute_force_optimum(inst)[0] == 2  # minimize cut edges between halves


def test_colorable_subgraph():
    inst = P.MaxColorableSubgraph(complete_graph(3), 2)
    assert P.brute_force_optimum(inst)[0] == 2


def test_min_graph_coloring_counts_colors():
    inst = P.MinGraphColoring(cycle_graph(5))
    assert P.brute_force_optimum(inst)[0] == 3


def tsp_oracle(d):
    n = len(d)
    return min(sum(d[t[i]][t[(i + 1) % n]] for i in range(n)) for t in itertools.permutations(range(n)))


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 5).flatmap(lambda n: st.lists(st.lists(st.integers(1, 20), min_size=n, max_size=n),
                                                     min_size=n, max_size=n)))
def test_tsp_matches_oracle(rows):
    d = [[0 if i == j else x for j, x in enumerate(r)] for i, r in enumerate(rows)]
    inst = P.TSP(tuple(tuple(r) for r in d))
    assert P.brute_force_optimum(inst)[0] == tsp_oracle(d)


def test_sms_total_tardiness_hand_value():
    # jobs p=(2,1), d=(1,1): order (0,1) finishes at 2 and 3 -> tardiness 1 + 2
    inst = P.SmsTotalTardiness((2, 1), (1, 1))
    assert inst.objective((0, 1)) == 3
    assert inst.objective((1, 0)) == 2
    assert P.brute_force_optimum(inst)[0] == 2


def test_sms_squared_tardiness_optimum_matches_oracle():
    inst = P.SmsSquaredTardiness((1, 2), (2, 1))
    best = min(sum((max(0, s + p - dd)) ** 2 for s, p, dd in
                   zip(P.packed_starts(o, inst.p), inst.p, inst.d)) for o in itertools.permutations(range(2)))
    assert P.brute_force_optimum(inst)[0] == best


def test_payload_roundtrip():
    for inst in (P.MaxCut(cycle_graph(4)), P.TSP(((0, 1, 2), (1, 0, 3), (2, 3, 0))),
                 P.MaxColorableSubgraph(path_graph(3), 3), P.SmsTotalTardiness((1, 2), (2, 2))):
        again = P.from_payload(inst.kind, inst.payload())
        assert again.fingerprint() == inst.fingerprint()


def test_aliases_and_unknown_kinds():
    assert P.canonical_kind("MIS") == "MaxIndependentSet"
    with pytest.raises(KeyError):
        P.canonical_kind("Sudoku")


def test_check_rejects_bad_configurations():
    with pytest.raises(P.ConfigurationError):
        P.MaxCut(path_graph(3)).objective((0, 1))
    with pytest.raises(P.ConfigurationError):
        P.TSP(((0, 1), (1, 0))).objective((0, 0))


@pytest.mark.parametrize("inst", [P.MaxClique(cycle_graph(5)), P.MinVertexCover(path_graph(4)),
                                  P.MinCliqueCover(path_graph(4)), P.SetSplitting(3, ((0, 1), (1, 2)))])
def test_reductions_preserve_optimum(inst):
    red = P.reduction(inst)
    assert red.value_back(P.brute_force_optimum(red.image)[0]) == P.brute_force_optimum(inst)[0]
