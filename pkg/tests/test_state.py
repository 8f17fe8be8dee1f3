from __future__ import annotations

import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from qaoa_kit import _kernels
from qaoa_kit.state import (
    ControlPredicate,
    DiagonalTable,
    Gate,
    GateError,
    HermitianTerm,
    PauliString,
    TwoLevel,
    apply_gate,
    basis_state,
    beta,
    fixed,
    gamma,
    gate_generator,
    gate_matrix,
    zero_state,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2)


def kron_q(ops: dict, n: int) -> np.ndarray:
    """Operator on n qubits with qubit q at bit q (little-endian): kron over q = n-1 .. 0."""
    out = np.eye(1)
    for q in reversed(range(n)):
        out = np.kron(out, ops.get(q, I2))
    return out


def rand_state(n, rng):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


angles = st.floats(-6.0, 6.0, allow_nan=False)


@given(angles)
def test_rx_rz_match_expm(t):
    for kind, op in (("rx", X), ("rz", Z)):
        g = Gate(kind, (1,), role=fixed(t))
        assert np.allclose(gate_matrix(g, 2), sla.expm(-1j * t * kron_q({1: op}, 2)), atol=1e-12)


@given(angles)
def test_xy_gate(t):
    h = kron_q({0: X, 2: X}, 3) + kron_q({0: Y, 2: Y}, 3)
    assert np.allclose(gate_matrix(Gate("xy", (0, 2), role=fixed(t)), 3), sla.expm(-1j * t * h), atol=1e-12)


@given(angles)
def test_multi_z(t):
    h = kron_q({0: Z, 1: Z, 3: Z}, 4)
    assert np.allclose(gate_matrix(Gate("multi_z", (0, 1, 3), role=fixed(t)), 4), sla.expm(-1j * t * h), atol=1e-12)


def test_controls_apply_only_on_pattern():
    t = 0.37
    g = Gate("rx", (0,), controls=((1, 1), (2, 0)), role=fixed(t))
    u = gate_matrix(g, 3)
    proj = kron_q({1: np.diag([0, 1]), 2: np.diag([1, 0])}, 3)
    expected = sla.expm(-1j * t * proj @ kron_q({0: X}, 3))
    assert np.allclose(u, expected, atol=1e-12)


def test_two_level_generator():
    g = Gate("two_level", (0, 1), patterns=(0b01, 0b10), role=fixed(1.0))
    h = gate_generator(g, 2)
    assert h[0b01, 0b10] == 1 and h[0b10, 0b01] == 1
    assert np.count_nonzero(h) == 2


def test_fixed_x_and_h_are_exact():
    assert np.allclose(gate_matrix(Gate("x", (0,)), 1), X, atol=1e-12)
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    assert np.allclose(gate_matrix(Gate("h", (0,)), 1), h, atol=1e-12)


def test_diag_gate():
    table = DiagonalTable(2, lambda idx: idx.astype(float) ** 2)
    g = Gate("diag", role=gamma(1), payload=table)
    psi = apply_gate(np.full(4, 0.5, dtype=complex), g, {("gamma", 1): 0.3})
    assert np.allclose(psi, 0.5 * np.exp(-0.3j * np.arange(4) ** 2))


def test_unresolved_role_raises():
    with pytest.raises(GateError):
        apply_gate(zero_state(1), Gate("rx", (0,), role=beta(2)), {("beta", 1): 0.1})


@pytest.mark.parametrize("bad", [
    dict(kind="nope"),
    dict(kind="rx", targets=(0, 1)),
    dict(kind="rx", targets=(0,), controls=((0, 1),)),
    dict(kind="two_level", targets=(0,), patterns=(1, 1)),
    dict(kind="rz", targets=(-1,)),
])
def test_gate_validation(bad):
    with pytest.raises(GateError):
        Gate(**bad)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_backends_agree(seed):
    rng = np.random.default_rng(seed)
    n = 4
    psi = rand_state(n, rng)
    gates = [
        Gate("rx", (1,), controls=((0, 1),), role=fixed(rng.uniform(-3, 3))),
        Gate("multi_z", (0, 2, 3), role=fixed(rng.uniform(-3, 3))),
        Gate("xy", (1, 3), controls=((2, 0),), role=fixed(rng.uniform(-3, 3))),
        Gate("two_level", (0, 1, 2), patterns=(0b011, 0b100), role=fixed(rng.uniform(-3, 3))),
        Gate("h", (2,)),
    ]
    a, b = psi.copy(), psi.copy()
    for g in gates:
        a = apply_gate(a, g, backend="numpy")
        b = apply_gate(b, g, backend=_kernels.BACKEND)
    assert np.allclose(a, b, atol=1e-12)
    assert math.isclose(np.linalg.norm(a), 1.0, rel_tol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_apply_matches_dense(seed):
    rng = np.random.default_rng(seed)
    psi = rand_state(3, rng)
    g = Gate("two_level", (2, 0), controls=((1, 0),), patterns=(0b01, 0b10), role=fixed(rng.uniform(-2, 2)))
    assert np.allclose(apply_gate(psi, g), gate_matrix(g, 3) @ psi, atol=1e-12)


def test_basis_and_zero_states():
    assert zero_state(2)[0] == 1
    assert basis_state(3, 5)[5] == 1
    with pytest.raises(IndexError):
        basis_state(2, 4)


def test_control_predicate_holds():
    pred = ControlPredicate((((0, 1), (1, 0)), ((2, 1),)))  # (q0 or not q1) and q2
    idx = np.arange(8)
    want = [((i & 1) or not (i >> 1 & 1)) and (i >> 2 & 1) for i in idx]
    assert pred.holds(idx).tolist() == [bool(w) for w in want]


def test_hermitian_terms_match_kron():
    ps = HermitianTerm(0.5, PauliString(((0, "X"), (2, "Y"))), ControlPredicate.all_of([(1, 1)]))
    want = 0.5 * kron_q({0: X, 2: Y, 1: np.diag([0, 1])}, 3)
    assert np.allclose(ps.to_sparse(3).toarray(), want)
    tl = HermitianTerm(1.0, TwoLevel((0, 2), 0b01, 0b10)).to_sparse(3).toarray()
    assert np.allclose(tl, tl.conj().T) and tl[0b001, 0b100] == 1
