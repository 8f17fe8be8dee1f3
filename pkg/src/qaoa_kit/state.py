"""Dense statevectors, gate primitives and Hermitian terms.

Conventions used across the package:

* qubit ``q`` is bit ``q`` of a basis index (little-endian);
* every parameterized primitive realizes ``U = exp(-i * theta * G)`` for its
  generator ``G``, where ``theta`` is the resolved angle.

States are plain numpy arrays of shape ``(2**n,)`` or ``(2**n, batch)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from . import _kernels

MAX_DENSE_QUBITS = 14
DIAG_CACHE_QUBITS = 20

GATE_KINDS = (
    "x",  # Pauli X (fixed)
    "h",  # Hadamard (fixed)
    "rx",  # exp(-i t X)
    "rz",  # exp(-i t Z)
    "multi_z",  # exp(-i t Z..Z); zero targets gives a (controlled) phase
    "xy",  # exp(-i t (XX + YY))
    "two_level",  # exp(-i t (|a><b| + |b><a|)) on a local register
    "swap_exp",  # exp(+i t SWAP) = cos t I + i sin t SWAP
    "diag",  # exp(-i t g(x)) over the whole register
    "unitary",  # exp(-i t G) for a dense local Hermitian G
    "hamiltonian",  # exp(-i t H) for a sparse Hermitian H over the whole register
)
FIXED_KINDS = frozenset({"x", "h"})


class GateError(ValueError):
    pass


@dataclass(frozen=True)
class AngleRole:
    """Binds a gate angle to ``coeff * gamma_k``, ``coeff * beta_k`` or ``coeff``."""

    kind: str = "fixed"
    k: int = 0
    coeff: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gamma", "beta", "fixed"):
            raise GateError(f"bad angle role {self.kind!r}")

    @property
    def key(self) -> tuple[str, int] | None:
        return None if self.kind == "fixed" else (self.kind, self.k)

    def resolve(self, angles: Mapping[tuple[str, int], float] | None) -> float:
        if self.kind == "fixed":
            return float(self.coeff)
        if angles is None or self.key not in angles:
            raise GateError(f"unresolved angle role {self.kind}({self.k})")
        return float(self.coeff) * float(angles[self.key])

    def with_k(self, k: int) -> "AngleRole":
        return AngleRole(self.kind, k, self.coeff) if self.kind != "fixed" else self

    def __str__(self) -> str:
        return "fixed" if self.kind == "fixed" else f"{self.kind}({self.k})"


def gamma(k: int, coeff: float = 1.0) -> AngleRole:
    return AngleRole("gamma", k, coeff)


def beta(k: int, coeff: float = 1.0) -> AngleRole:
    return AngleRole("beta", k, coeff)


def fixed(coeff: float) -> AngleRole:
    return AngleRole("fixed", 0, coeff)


@dataclass(frozen=True, eq=False)
class Gate:
    """One gate primitive.

    ``controls`` is a tuple of ``(qubit, required_bit)``.  ``patterns`` holds the
    local labels ``(a, b)`` of a two-level rotation, with local bit ``k``
    living on ``targets[k]``.  ``payload`` carries the phase table (``diag``),
    the local generator (``unitary``) or the sparse generator (``hamiltonian``).
    ``tag`` groups gates that belong to one partial mixer or separator term.
    """

    kind: str
    targets: tuple[int, ...] = ()
    controls: tuple[tuple[int, int], ...] = ()
    role: AngleRole = field(default_factory=lambda: fixed(1.0))
    patterns: tuple[int, int] | None = None
    payload: object = None
    tag: object = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise GateError(f"unknown gate kind {self.kind!r}")
        tg = tuple(int(t) for t in self.targets)
        ct = tuple((int(q), int(b)) for q, b in self.controls)
        object.__setattr__(self, "targets", tg)
        object.__setattr__(self, "controls", ct)
        cq = [q for q, _ in ct]
        if len(set(tg)) != len(tg) or len(set(cq)) != len(cq):
            raise GateError("repeated qubit in targets or controls")
        if set(tg) & set(cq):
            raise GateError("targets and controls overlap")
        if any(q < 0 for q in tg + tuple(cq)):
            raise GateError("negative qubit index")
        if any(b not in (0, 1) for _, b in ct):
            raise GateError("control bits must be 0 or 1")
        arity = {"x": 1, "h": 1, "rx": 1, "rz": 1, "xy": 2, "swap_exp": 2}
        if self.kind in arity and len(tg) != arity[self.kind]:
            raise GateError(f"{self.kind} takes {arity[self.kind]} target(s)")
        if self.kind == "two_level":
            if self.patterns is None or len(tg) == 0:
                raise GateError("two_level needs targets and patterns")
            a, b = self.patterns
            if a == b or not (0 <= a < 1 << len(tg)) or not (0 <= b < 1 << len(tg)):
                raise GateError("bad two_level patterns")
        if self.kind in ("diag", "hamiltonian") and (tg or ct):
            raise GateError(f"{self.kind} acts on the whole register")
        if self.kind == "unitary":
            g = np.asarray(self.payload)
            if g.shape != (1 << len(tg), 1 << len(tg)):
                raise GateError("unitary payload shape mismatch")
            if not np.allclose(g, g.conj().T, atol=1e-12):
                raise GateError("unitary payload generator must be Hermitian")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.targets + tuple(q for q, _ in self.controls)

    @property
    def arity(self) -> int:
        return len(self.targets) + len(self.controls)

    def with_role(self, role: AngleRole) -> "Gate":
        return Gate(self.kind, self.targets, self.controls, role, self.patterns, self.payload, self.tag)

    def with_tag(self, tag) -> "Gate":
        return Gate(self.kind, self.targets, self.controls, self.role, self.patterns, self.payload, tag)


class DiagonalTable:
    """Phase function g over basis indices, with a lazily cached table."""

    def __init__(self, n_qubits: int, fn: Callable[[np.ndarray], np.ndarray] | None = None,
                 table: np.ndarray | None = None):
        if fn is None and table is None:
            raise ValueError("need fn or table")
        self.n_qubits = n_qubits
        self.fn = fn
        self._table = None if table is None else np.asarray(table, dtype=float)
        if self._table is not None and self._table.shape != (1 << n_qubits,):
            raise ValueError("table length must be 2**n")

    def table(self) -> np.ndarray:
        if self._table is not None:
            return self._table
        t = np.asarray(self.fn(np.arange(1 << self.n_qubits, dtype=np.int64)), dtype=float)
        if self.n_qubits <= DIAG_CACHE_QUBITS:
            self._table = t
        return t

    def __call__(self, x):
        return self.table()[x]


# --------------------------------------------------------------------------
# state helpers
# --------------------------------------------------------------------------


def zero_state(n_qubits: int) -> np.ndarray:
    psi = np.zeros(1 << n_qubits, dtype=np.complex128)
    psi[0] = 1.0
    return psi


def basis_state(n_qubits: int, index: int) -> np.ndarray:
    if not 0 <= index < 1 << n_qubits:
        raise IndexError(f"basis index {index} out of range")
    psi = np.zeros(1 << n_qubits, dtype=np.complex128)
    psi[index] = 1.0
    return psi


def basis_block(n_qubits: int, indices: Sequence[int]) -> np.ndarray:
    """Columns are the basis states ``indices``."""
    block = np.zeros((1 << n_qubits, len(indices)), dtype=np.complex128)
    block[np.asarray(indices, dtype=np.int64), np.arange(len(indices))] = 1.0
    return block


def n_qubits_of(psi: np.ndarray) -> int:
    dim = psi.shape[0]
    n = dim.bit_length() - 1
    if 1 << n != dim:
        raise ValueError("state length is not a power of two")
    return n


def _masks(controls) -> tuple[int, int]:
    cmask = cval = 0
    for q, b in controls:
        cmask |= 1 << q
        cval |= b << q
    return cmask, cval


def _local_pattern_mask(targets, pattern: int) -> int:
    out = 0
    for k, t in enumerate(targets):
        if (pattern >> k) & 1:
            out |= 1 << t
    return out


def _cached_eigh(gate: Gate):
    cache = gate.__dict__.get("_eigh")
    if cache is None:
        w, v = np.linalg.eigh(np.asarray(gate.payload, dtype=np.complex128))
        cache = (w, v)
        object.__setattr__(gate, "_eigh", cache)
    return cache


def apply_gate_inplace(psi: np.ndarray, gate: Gate, angles=None, backend: str | None = None) -> None:
    """Apply ``gate`` to the 2-D block ``psi`` in place."""
    k = _kernels.kernels(backend)
    n = n_qubits_of(psi)
    if gate.qubits and max(gate.qubits) >= n:
        raise GateError(f"gate on qubit {max(gate.qubits)} but register has {n}")
    cmask, cval = _masks(gate.controls)
    kind = gate.kind
    if kind == "x":
        t = 1 << gate.targets[0]
        k["pair_rotate"](psi, cmask, cval, t, 0, t, 0, 1, 1, 0)
        return
    if kind == "h":
        t = 1 << gate.targets[0]
        r = 1 / math.sqrt(2)
        k["pair_rotate"](psi, cmask, cval, t, 0, t, r, r, r, -r)
        return
    theta = gate.role.resolve(angles)
    if kind == "rx":
        t = 1 << gate.targets[0]
        c, s = math.cos(theta), math.sin(theta)
        k["pair_rotate"](psi, cmask, cval, t, 0, t, c, -1j * s, -1j * s, c)
    elif kind in ("rz", "multi_z"):
        zmask = _local_pattern_mask(gate.targets, (1 << len(gate.targets)) - 1)
        k["phase_parity"](psi, cmask, cval, zmask, np.exp(-1j * theta), np.exp(1j * theta))
    elif kind == "xy":
        a, b = gate.targets
        tm = (1 << a) | (1 << b)
        c, s = math.cos(2 * theta), math.sin(2 * theta)
        k["pair_rotate"](psi, cmask, cval, tm, 1 << a, 1 << b, c, -1j * s, -1j * s, c)
    elif kind == "two_level":
        tm = _local_pattern_mask(gate.targets, (1 << len(gate.targets)) - 1)
        pa = _local_pattern_mask(gate.targets, gate.patterns[0])
        pb = _local_pattern_mask(gate.targets, gate.patterns[1])
        c, s = math.cos(theta), math.sin(theta)
        k["pair_rotate"](psi, cmask, cval, tm, pa, pb, c, -1j * s, -1j * s, c)
    elif kind == "swap_exp":
        a, b = gate.targets
        tm = (1 << a) | (1 << b)
        c, s = math.cos(theta), math.sin(theta)
        k["pair_rotate"](psi, cmask, cval, tm, 1 << a, 1 << b, c, 1j * s, 1j * s, c)
        # |00> and |11> pick up exp(i theta); the swapped pair has odd parity
        k["phase_parity"](psi, cmask, cval, tm, np.exp(1j * theta), 1.0)
    elif kind == "diag":
        table = gate.payload.table() if isinstance(gate.payload, DiagonalTable) else np.asarray(gate.payload)
        if table.shape[0] != psi.shape[0]:
            raise GateError("diag table length does not match register")
        k["diag_mul"](psi, np.exp(-1j * theta * table))
    elif kind == "unitary":
        w, v = _cached_eigh(gate)
        u = (v * np.exp(-1j * theta * w)) @ v.conj().T
        k["local_unitary"](psi, cmask, cval, gate.targets, u)
    elif kind == "hamiltonian":
        h = gate.payload
        if h.shape[0] != psi.shape[0]:
            raise GateError("hamiltonian dimension does not match register")
        psi[:] = expm_multiply(-1j * theta * h, psi)
    else:  # pragma: no cover
        raise GateError(kind)


def apply_gate(state: np.ndarray, gate: Gate, angles=None, backend: str | None = None) -> np.ndarray:
    """Return ``U|state>`` for the gate's unitary (input left untouched)."""
    psi = np.array(state, dtype=np.complex128, copy=True)
    flat = psi.ndim == 1
    block = psi.reshape(-1, 1) if flat else psi
    apply_gate_inplace(block, gate, angles, backend)
    return block.reshape(-1) if flat else block


def apply_diagonal_phase(state: np.ndarray, g, gamma_: float) -> np.ndarray:
    """``amps[x] *= exp(-i gamma g(x))``; ``g`` is a callable on index arrays or a table."""
    psi = np.array(state, dtype=np.complex128, copy=True)
    idx = np.arange(psi.shape[0], dtype=np.int64)
    vals = np.asarray(g(idx) if callable(g) else g, dtype=float)
    phases = np.exp(-1j * gamma_ * vals)
    return psi * (phases if psi.ndim == 1 else phases[:, None])


def expm_hermitian(h, theta: float) -> np.ndarray:
    """Dense ``exp(-i theta H)`` via eigendecomposition."""
    h = h.toarray() if sp.issparse(h) else np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("H must be square")
    if h.shape[0] > 1 << MAX_DENSE_QUBITS:
        raise ValueError(f"dimension {h.shape[0]} exceeds the dense cap 2^{MAX_DENSE_QUBITS}")
    if not np.allclose(h, h.conj().T, atol=1e-10, rtol=0):
        raise ValueError("H is not Hermitian")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * theta * w)) @ v.conj().T


# --------------------------------------------------------------------------
# Hermitian terms
# --------------------------------------------------------------------------

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliString:
    ops: tuple[tuple[int, str], ...]

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.ops)


@dataclass(frozen=True)
class TwoLevel:
    """``|a><b| + |b><a|`` on local register ``qubits`` (local bit k on qubits[k])."""

    qubits: tuple[int, ...]
    a: int
    b: int


@dataclass(frozen=True)
class ControlPredicate:
    """Conjunction of clauses; each clause is an OR of ``(qubit, bit)`` literals."""

    clauses: tuple[tuple[tuple[int, int], ...], ...] = ()

    @classmethod
    def all_of(cls, literals) -> "ControlPredicate":
        return cls(tuple(((int(q), int(b)),) for q, b in literals))

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(sorted({q for cl in self.clauses for q, _ in cl}))

    @property
    def is_conjunction(self) -> bool:
        return all(len(cl) == 1 for cl in self.clauses)

    @property
    def unsatisfiable(self) -> bool:
        return any(len(cl) == 0 for cl in self.clauses)

    def literals(self) -> tuple[tuple[int, int], ...]:
        if not self.is_conjunction:
            raise ValueError("predicate is not a plain conjunction")
        return tuple(cl[0] for cl in self.clauses)

    def holds(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        ok = np.ones(idx.shape, dtype=bool)
        for cl in self.clauses:
            c = np.zeros(idx.shape, dtype=bool)
            for q, b in cl:
                c |= ((idx >> q) & 1) == b
            ok &= c
        return ok


@dataclass(frozen=True)
class HermitianTerm:
    """``coefficient * body``, optionally gated by a control projector."""

    coefficient: float
    body: PauliString | TwoLevel | ControlPredicate
    control: ControlPredicate | None = None

    @property
    def support(self) -> tuple[int, ...]:
        if isinstance(self.body, PauliString):
            return self.body.qubits
        if isinstance(self.body, TwoLevel):
            return self.body.qubits
        return self.body.qubits

    def to_sparse(self, n_qubits: int) -> sp.csr_matrix:
        dim = 1 << n_qubits
        cols = np.arange(dim, dtype=np.int64)
        body = self.body
        if isinstance(body, PauliString):
            flip = 0
            vals = np.ones(dim, dtype=complex)
            for q, op in body.ops:
                bit = (cols >> q) & 1
                if op in ("X", "Y"):
                    flip |= 1 << q
                if op == "Y":
                    vals *= 1j * (1 - 2 * bit)
                elif op == "Z":
                    vals *= 1 - 2 * bit
                elif op not in ("X", "I"):
                    raise ValueError(f"bad Pauli {op!r}")
            rows = cols ^ flip
        elif isinstance(body, TwoLevel):
            tm = _local_pattern_mask(body.qubits, (1 << len(body.qubits)) - 1)
            pa = _local_pattern_mask(body.qubits, body.a)
            pb = _local_pattern_mask(body.qubits, body.b)
            ca = cols[(cols & tm) == pa]
            cb = cols[(cols & tm) == pb]
            rows = np.concatenate([(ca & ~tm) | pb, (cb & ~tm) | pa])
            cols = np.concatenate([ca, cb])
            vals = np.ones(cols.shape, dtype=complex)
        else:
            keep = body.holds(cols)
            cols = cols[keep]
            rows = cols
            vals = np.ones(cols.shape, dtype=complex)
        if self.control is not None:
            keep = self.control.holds(cols)
            rows, cols, vals = rows[keep], cols[keep], vals[keep]
        return sp.csr_matrix((self.coefficient * vals, (rows, cols)), shape=(dim, dim))


def terms_to_sparse(terms: Sequence[HermitianTerm], n_qubits: int) -> sp.csr_matrix:
    dim = 1 << n_qubits
    out = sp.csr_matrix((dim, dim), dtype=complex)
    for t in terms:
        out = out + t.to_sparse(n_qubits)
    return out


# --------------------------------------------------------------------------
# dense references for single gates
# --------------------------------------------------------------------------


def _kron_local(ops: list[np.ndarray]) -> np.ndarray:
    """Kronecker product with ops[0] acting on local bit 0 (rightmost factor)."""
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(op, out)
    return out


def _basis_op(a_bit: int, b_bit: int) -> np.ndarray:
    m = np.zeros((2, 2), dtype=complex)
    m[a_bit, b_bit] = 1.0
    return m


def local_generator(gate: Gate) -> tuple[np.ndarray, tuple[int, ...], float]:
    """Generator on the gate's own qubits (targets then controls).

    Returns ``(G, qubits, theta_scale)`` where the gate equals
    ``exp(-i theta G)`` with ``theta = theta_scale`` for fixed kinds and the
    resolved angle otherwise.  Built from Kronecker products, independently
    of the kernels.
    """
    kind = gate.kind
    nt = len(gate.targets)
    if kind in ("diag", "hamiltonian"):
        raise ValueError("full-register gate has no local generator")
    if kind == "x":
        g = (math.pi / 2) * (_PAULI["X"] - _PAULI["I"])
    elif kind == "h":
        hm = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
        g = (math.pi / 2) * (hm - _PAULI["I"])
    elif kind == "rx":
        g = _PAULI["X"]
    elif kind in ("rz", "multi_z"):
        g = _kron_local([_PAULI["Z"]] * nt)
    elif kind == "xy":
        g = _kron_local([_PAULI["X"]] * 2) + _kron_local([_PAULI["Y"]] * 2)
    elif kind == "two_level":
        a, b = gate.patterns
        ab = _kron_local([_basis_op((a >> k) & 1, (b >> k) & 1) for k in range(nt)])
        g = ab + ab.conj().T
    elif kind == "swap_exp":
        swap = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
        g = -swap
    elif kind == "unitary":
        g = np.asarray(gate.payload, dtype=complex)
    else:  # pragma: no cover
        raise ValueError(kind)
    # controls occupy the higher local bits, gated by a projector
    proj = _kron_local([_basis_op(b, b) for _, b in gate.controls]) if gate.controls else np.ones((1, 1))
    full = np.kron(proj, g)
    scale = 1.0 if kind in FIXED_KINDS else None
    return full, gate.qubits, scale


def embed_local(op: np.ndarray, qubits: Sequence[int], n_qubits: int) -> np.ndarray:
    """Dense ``op`` on ``qubits`` (local bit k on qubits[k]) tensored with identity."""
    dim = 1 << n_qubits
    idx = np.arange(dim, dtype=np.int64)
    mask = 0
    loc = np.zeros(dim, dtype=np.int64)
    for k, q in enumerate(qubits):
        mask |= 1 << q
        loc |= ((idx >> q) & 1) << k
    rest = idx & ~mask
    same = rest[:, None] == rest[None, :]
    return np.where(same, op[loc[:, None], loc[None, :]], 0)


def gate_generator(gate: Gate, n_qubits: int) -> np.ndarray:
    """Dense full-register generator of ``gate``."""
    if gate.kind == "diag":
        t = gate.payload.table() if isinstance(gate.payload, DiagonalTable) else np.asarray(gate.payload)
        return np.diag(t.astype(complex))
    if gate.kind == "hamiltonian":
        return gate.payload.toarray()
    g, qubits, _ = local_generator(gate)
    return embed_local(g, qubits, n_qubits)


def gate_matrix(gate: Gate, n_qubits: int, angles=None) -> np.ndarray:
    """Dense unitary of ``gate`` on ``n_qubits`` via exponentiating its generator."""
    theta = 1.0 if gate.kind in FIXED_KINDS else gate.role.resolve(angles)
    if gate.kind == "diag":
        t = gate.payload.table() if isinstance(gate.payload, DiagonalTable) else np.asarray(gate.payload)
        return np.diag(np.exp(-1j * theta * t))
    if gate.kind == "hamiltonian":
        return expm_hermitian(gate.payload, theta)
    g, qubits, _ = local_generator(gate)
    u = expm_hermitian(g, theta)
    return embed_local(u, qubits, n_qubits)
