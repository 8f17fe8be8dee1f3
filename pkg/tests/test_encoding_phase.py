from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qaoa_kit import catalog as C
from qaoa_kit import encoding as E
from qaoa_kit import problems as P
from qaoa_kit.graphs import complete_graph, path_graph
from qaoa_kit.phase import build_phase_separator


@settings(max_examples=50)
@given(st.integers(2, 5).flatmap(lambda d: st.tuples(st.just(d), st.lists(st.integers(0, d - 1), min_size=1,
                                                                            max_size=3))))
def test_onehot_and_binary_roundtrip(dv):
    d, cfg = dv
    for cls in (E.OneHotEncoding, E.BinaryEncoding):
        enc = cls(d, len(cfg))
        assert enc.decode(enc.encode(tuple(cfg))) == tuple(cfg)


def test_onehot_layout_and_invalid_words():
    enc = E.OneHotEncoding(3, 2)
    assert enc.n_qubits == 6
    idx = enc.encode((2, 0))
    assert idx == (1 << enc.qubit(0, 2)) | (1 << enc.qubit(1, 0))
    assert enc.decode(0) is None
    assert enc.decode(0b000011) is None


def test_binary_rejects_values_past_d():
    enc = E.BinaryEncoding(3, 1)
    assert enc.n_qubits == 2
    assert enc.decode(0b11) is None


@settings(max_examples=30)
@given(st.permutations(range(4)))
def test_direct_encoding_roundtrip(order):
    enc = E.DirectOneHotEncoding(4)
    assert enc.n_qubits == 16
    assert enc.decode(enc.encode(tuple(order))) == tuple(order)


def test_product_encoding():
    enc = E.ProductEncoding([E.DirectOneHotEncoding(2), E.SlackEncoding((1, 2))])
    cfg = ((1, 0), (1, 3))
    assert enc.decode(enc.encode(cfg)) == cfg


def test_enumerate_feasible_counts():
    inst = P.MaxIndependentSet(path_graph(3))
    assert len(E.enumerate_feasible(inst, E.BitEncoding(3))) == 5
    tsp = P.TSP(((0, 1, 1), (1, 0, 1), (1, 1, 0)))
    assert len(E.enumerate_feasible(tsp, E.DirectOneHotEncoding(3))) == 6


# ---- phase separators: g must equal the declared affine map of f on feasible states


def _check_affine(pipe):
    feas = E.enumerate_feasible(pipe.inst, pipe.enc)
    idx = np.array(feas, dtype=np.int64)
    f = np.array([pipe.inst.objective(pipe.enc.decode(int(i))) for i in idx])
    g = pipe.sep.g(idx)
    assert np.allclose(g, pipe.sep.affine.apply(f), atol=1e-9)


@pytest.mark.parametrize("entry", C.catalog_entries(), ids=lambda e: f"{e[0]}-{e[2]}")
def test_declared_affine_holds_on_catalog(entry):
    kind, enc, mix = entry
    pipe = C.build_pipeline(C.example_instance(kind, enc, mix), enc, mix, r=2 if mix == "rnv" else 1)
    _check_affine(pipe)


@pytest.mark.parametrize("mode", ["encoded", "semantic"])
def test_modes_share_objective(mode):
    inst = P.MaxColorableSubgraph(complete_graph(3), 3)
    pipe = C.build_pipeline(inst, phase_mode=mode)
    _check_affine(pipe)


def test_maxcut_affine_constants():
    sep = build_phase_separator(P.MaxCut(complete_graph(4)), E.BitEncoding(4))
    assert sep.affine.scale == -2 and sep.affine.offset == 6


def test_colorable_subgraph_affine_constants():
    inst = P.MaxColorableSubgraph(path_graph(3), 3)
    sep = build_phase_separator(inst, E.OneHotEncoding(3, 3))
    assert sep.affine.scale == -4 and sep.affine.offset == inst.graph.m * inst.kappa


def test_mis_phase_uses_single_qubit_rotations():
    sep = build_phase_separator(P.MaxIndependentSet(path_graph(4)), E.BitEncoding(4))
    assert sep.affine.scale == -2 and sep.affine.offset == 4
    assert all(len(t.zs) == 1 for t in sep.terms)
