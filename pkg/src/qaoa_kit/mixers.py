"""Partial mixers, ordered partitions and their circuit / dense realizations.

Every catalog partial mixer has the form

    H = w * (|a><b| + |b><a|) on a local register  (x)  [control predicate]

so one dataclass covers bit flips, XY ring terms, null swaps, controlled
swaps and the 4-qubit ordering and time swaps.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import encoding as E
from . import problems as P
from .graphs import kn_edge_coloring
from .state import (
    ControlPredicate,
    Gate,
    HermitianTerm,
    TwoLevel,
    beta,
    expm_hermitian,
    terms_to_sparse,
)

ANCILLA_THRESHOLD = 3
STRATEGIES = ("parity", "color", "color-parity", "time-color", "greedy-commuting", "singleton")
MIXER_KINDS = ("x", "ring", "rnv", "fully-connected", "binary-x", "binary-parity", "cx", "null-swap",
               "controlled-swap", "ordering-swap", "time-swap")


class MixerError(ValueError):
    pass


@dataclass(frozen=True)
class PartialMixer:
    label: tuple
    targets: tuple[int, ...]
    a: int
    b: int
    weight: float = 1.0
    control: ControlPredicate = field(default_factory=ControlPredicate)
    ring: tuple[int, int, int, int] | None = None  # (register, position, ring size, offset)
    pair: tuple[int, int] | None = None  # item pair for color-based partitions
    slot: int | None = None  # slot or time index
    slot_class: int | None = None  # parity class of the slot (0, 1, or 2 for the wrap term)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self.targets)

    @property
    def control_support(self) -> frozenset[int]:
        return frozenset(self.control.qubits)

    @property
    def generator(self) -> list[HermitianTerm]:
        ctrl = self.control if self.control.clauses else None
        return [HermitianTerm(self.weight, TwoLevel(self.targets, self.a, self.b), ctrl)]

    def to_sparse(self, n_qubits: int) -> sp.csr_matrix:
        return terms_to_sparse(self.generator, n_qubits)

    def commutes_structurally(self, other: "PartialMixer") -> bool:
        """Targets of each avoid all qubits of the other (shared controls are fine)."""
        mine = self.support | self.control_support
        theirs = other.support | other.control_support
        return not (self.support & theirs) and not (other.support & mine)


@dataclass(frozen=True)
class OrderedPartition:
    parts: tuple[tuple[tuple, ...], ...]
    strategy: str

    def labels(self) -> list[tuple]:
        return [lab for part in self.parts for lab in part]


@dataclass
class MixerSpec:
    partials: list[PartialMixer]
    family: str = "partitioned"  # or "simultaneous"
    partition: OrderedPartition | None = None
    repeats: int = 1
    kind: str = ""
    compile: str = "two-level"  # "add" selects the increment-based binary parity circuit
    ancilla_threshold: int | None = ANCILLA_THRESHOLD
    binary_registers: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.repeats < 1:
            raise MixerError("repeats must be >= 1")
        if self.family not in ("partitioned", "simultaneous"):
            raise MixerError(f"unknown mixer family {self.family!r}")
        if self.family == "partitioned" and self.partition is None and self.compile != "add":
            self.partition = make_partition(self.partials, "greedy-commuting")

    def hamiltonian(self, n_qubits: int) -> sp.csr_matrix:
        out = sp.csr_matrix((1 << n_qubits, 1 << n_qubits), dtype=complex)
        for pm in self.partials:
            out = out + pm.to_sparse(n_qubits)
        return out


# --------------------------------------------------------------------------
# partial-mixer catalogs
# --------------------------------------------------------------------------


def _ring_partials(registers, offsets=(1,)) -> list[PartialMixer]:
    out = []
    for rid, qs in enumerate(registers):
        d = len(qs)
        if d < 2:
            continue
        for s in offsets:
            for pos in range(d):
                q0, q1 = qs[pos], qs[(pos + s) % d]
                if q0 == q1:
                    continue
                out.append(PartialMixer(("ring", rid, s, pos), (q0, q1), 0b01, 0b10, ring=(rid, pos, d, s)))
    return out


def _binary_ring_partials(enc: E.BinaryEncoding, d: int) -> list[PartialMixer]:
    out = []
    for rid, reg in enumerate(enc.registers):
        for pos in range(d):
            out.append(PartialMixer(("ring", rid, 1, pos), reg.qubits, pos, (pos + 1) % d, ring=(rid, pos, d, 1)))
    return out


def _ring_registers(enc: E.Encoding) -> list[tuple[int, ...]]:
    if isinstance(enc, E.OneHotEncoding):
        return [r.qubits for r in enc.registers]
    if isinstance(enc, E.BitEncoding):
        return [tuple(range(enc.n_qubits))]
    raise MixerError(f"ring mixers need one-hot or bit encodings, got {type(enc).__name__}")


def _controlled_bitflips(graph, enc) -> list[PartialMixer]:
    return [
        PartialMixer(("cx", v), (v,), 0, 1, control=ControlPredicate.all_of((w, 0) for w in graph.neighbors(v)))
        for v in range(graph.n)
    ]


def _ordering_swaps(enc: E.DirectOneHotEncoding, cyclic: bool) -> list[PartialMixer]:
    n = enc.n
    lo = enc.offset
    items = range(lo, n)
    slots = list(range(lo, n - 1))
    n_free = n - lo
    if cyclic and n_free > 2:
        slots.append(n - 1)
    out = []
    for i in slots:
        j = i + 1 if i + 1 < n else lo
        if i == n - 1:
            cls = 2 if n_free % 2 else 1
        else:
            cls = (i - lo) % 2
        for u, v in itertools.combinations(items, 2):
            tg = (enc.qubit(u, i), enc.qubit(v, j), enc.qubit(v, i), enc.qubit(u, j))
            out.append(PartialMixer(("ps", i, u, v), tg, 0b0011, 0b1100, pair=(u, v), slot=i, slot_class=cls))
    return out


def build_partial_mixers(inst: P.Problem, enc: E.Encoding, kind: str, r: int = 1,
                         cyclic: bool = False) -> list[PartialMixer]:
    """Partial-mixer catalog for ``(inst, enc, kind)``.

    ``r`` sets the reach of the r-nearby-values mixer; ``cyclic`` adds the
    wrap-around slot pair to ordering swaps.
    """
    if kind == "x":
        qs = range(enc.n_qubits)
        if isinstance(enc, E.ProductEncoding):
            raise MixerError("use the ordering-swap kind for product encodings")
        return [PartialMixer(("x", q), (q,), 0, 1) for q in qs]

    if kind in ("ring", "rnv", "fully-connected"):
        if isinstance(inst, (P.MaxColorableSubgraph, P.GraphPartitioning, P.MaxVertexKCover)) or (
            isinstance(enc, E.OneHotEncoding) and not isinstance(inst, (P.MaxColorableInducedSubgraph, P.MinGraphColoring))
        ):
            regs = _ring_registers(enc)
        else:
            raise MixerError(f"{kind} mixer does not apply to {inst.kind}")
        d = len(regs[0])
        reach = 1 if kind == "ring" else (d - 1 if kind == "fully-connected" else r)
        if reach < 1:
            raise MixerError("reach must be >= 1")
        return _ring_partials(regs, tuple(range(1, reach + 1)))

    if kind in ("binary-x", "binary-parity"):
        if not isinstance(enc, E.BinaryEncoding) or not isinstance(inst, P.MaxColorableSubgraph):
            raise MixerError(f"{kind} needs a binary-encoded MaxColorableSubgraph")
        if enc.d != 1 << enc.l:
            raise MixerError(f"{kind} needs d = 2^l (got d={enc.d})")
        if kind == "binary-x":
            return [PartialMixer(("x", q), (q,), 0, 1) for q in range(enc.n_qubits)]
        return _binary_ring_partials(enc, enc.d)

    if kind == "cx":
        if not isinstance(enc, E.BitEncoding):
            raise MixerError("controlled bit flips need the bit encoding")
        if isinstance(inst, P.MaxIndependentSet):
            return _controlled_bitflips(inst.graph, enc)
        if isinstance(inst, P.MaxSetPacking):
            return _controlled_bitflips(inst.constraint_graph(), enc)
        if isinstance(inst, P.MinSetCover):
            out = []
            for j, s in enumerate(inst.subsets):
                clauses = []
                for e in s:
                    others = tuple((l, 1) for l, t in enumerate(inst.subsets) if l != j and e in t)
                    clauses.append(others)
                out.append(PartialMixer(("cx", j), (j,), 0, 1, control=ControlPredicate(tuple(clauses))))
            return out
        raise MixerError(f"cx mixer does not apply to {inst.kind}")

    if kind == "null-swap":
        if isinstance(inst, P.MaxColorableInducedSubgraph) and isinstance(enc, E.OneHotEncoding):
            out = []
            for v in range(inst.graph.n):
                for a in range(1, inst.kappa + 1):
                    ctrl = ControlPredicate.all_of((enc.qubit(w, a), 0) for w in inst.graph.neighbors(v))
                    out.append(PartialMixer(("ns", v, a), (enc.qubit(v, 0), enc.qubit(v, a)), 0b01, 0b10, control=ctrl))
            return out
        if isinstance(inst, P.SmsReleaseDates) and isinstance(enc, E.WindowOneHotEncoding):
            out = []
            for j in range(inst.n_items):
                for t in inst.windows[j]:
                    lits = []
                    for k in range(inst.n_items):
                        if k == j:
                            continue
                        lo, hi = max(t - inst.p[k] + 1, inst.r[k]), t + inst.p[j] - 1
                        lits += [(enc.qubit(k, tk), 0) for tk in inst.windows[k] if lo <= tk <= hi]
                    tg = (enc.qubit(j, t), enc.qubit(j, inst.buffers[j]))
                    out.append(PartialMixer(("ns", j, t), tg, 0b01, 0b10, control=ControlPredicate.all_of(lits), slot=t))
            return out
        raise MixerError(f"null-swap mixer does not apply to {inst.kind}")

    if kind == "controlled-swap":
        if not (isinstance(inst, P.MinGraphColoring) and isinstance(enc, E.OneHotEncoding)):
            raise MixerError("controlled-swap mixer needs a one-hot MinGraphColoring")
        out = []
        for v in range(inst.graph.n):
            for a, b in itertools.combinations(range(inst.kappa), 2):
                lits = []
                for w in inst.graph.neighbors(v):
                    lits += [(enc.qubit(w, a), 0), (enc.qubit(w, b), 0)]
                tg = (enc.qubit(v, a), enc.qubit(v, b))
                out.append(PartialMixer(("cs", v, a, b), tg, 0b01, 0b10, control=ControlPredicate.all_of(lits),
                                        pair=(a, b)))
        return out

    if kind == "ordering-swap":
        if isinstance(inst, P.TSP) and isinstance(enc, E.DirectOneHotEncoding):
            return _ordering_swaps(enc, cyclic)
        if isinstance(inst, P.SmsSquaredTardiness) and isinstance(enc, E.ProductEncoding):
            order_enc, slack_enc = enc.parts
            out = _ordering_swaps(order_enc, cyclic)
            base = enc.offsets[1]
            out += [PartialMixer(("x", base + q), (base + q,), 0, 1) for q in range(slack_enc.n_qubits)]
            return out
        raise MixerError(f"ordering-swap mixer does not apply to {inst.kind}")

    if kind == "time-swap":
        if not (isinstance(inst, P.SmsTotalTardiness) and isinstance(enc, E.AbsoluteOneHotEncoding)):
            raise MixerError("time-swap mixer needs an absolute-encoded SMSTotalTardiness")
        out = []
        h = enc.horizon
        for i, j in itertools.combinations(range(inst.n_items), 2):
            pi, pj = inst.p[i], inst.p[j]
            for t in range(0, h - pi - pj + 1):
                tg = (enc.qubit(i, t), enc.qubit(j, t + pi), enc.qubit(j, t), enc.qubit(i, t + pj))
                out.append(PartialMixer(("ts", t, i, j), tg, 0b0011, 0b1100, pair=(i, j), slot=t))
        return sorted(out, key=lambda pm: pm.label)

    raise MixerError(f"unknown mixer kind {kind!r}")


# --------------------------------------------------------------------------
# partitions
# --------------------------------------------------------------------------


def edge_coloring_complete_graph(n: int) -> OrderedPartition:
    parts = kn_edge_coloring(n)
    return OrderedPartition(tuple(tuple(p) for p in parts), "color")


def _pair_colors(partials) -> dict[tuple[int, int], int]:
    items = sorted({x for pm in partials for x in pm.pair})
    index = {x: k for k, x in enumerate(items)}
    colors = {}
    for c, part in enumerate(kn_edge_coloring(max(len(items), 2))):
        for a, b in part:
            if a < len(items) and b < len(items):
                colors[(items[a], items[b])] = c
    return colors


def _greedy(partials: list[PartialMixer]) -> list[list[PartialMixer]]:
    parts: list[list[PartialMixer]] = []
    for pm in sorted(partials, key=lambda p: p.label):
        for part in parts:
            if all(pm.commutes_structurally(o) for o in part):
                part.append(pm)
                break
        else:
            parts.append([pm])
    return parts


def _ring_class(pm: PartialMixer) -> int:
    _, pos, d, _ = pm.ring
    if d % 2 and pos == d - 1:
        return 2
    return pos % 2


def make_partition(partials: list[PartialMixer], strategy: str) -> OrderedPartition:
    if not partials:
        return OrderedPartition((), strategy)
    if strategy == "singleton":
        return OrderedPartition(tuple((pm.label,) for pm in sorted(partials, key=lambda p: p.label)), strategy)
    if strategy == "greedy-commuting":
        return OrderedPartition(tuple(tuple(pm.label for pm in part) for part in _greedy(partials)), strategy)
    if strategy == "parity":
        if any(pm.ring is None for pm in partials):
            raise MixerError("parity partition needs ring-labelled partials")
        keyed: dict[tuple, list] = {}
        for s in sorted({pm.ring[3] for pm in partials}):
            group = [pm for pm in partials if pm.ring[3] == s]
            if s == 1:
                for pm in group:
                    keyed.setdefault((s, _ring_class(pm)), []).append(pm)
            else:
                for c, part in enumerate(_greedy(group)):
                    keyed[(s, c)] = part
        parts = tuple(tuple(pm.label for pm in sorted(keyed[k], key=lambda p: p.label)) for k in sorted(keyed))
        return OrderedPartition(parts, strategy)
    if strategy in ("color", "color-parity", "time-color"):
        colored = [pm for pm in partials if pm.pair is not None]
        rest = [pm for pm in partials if pm.pair is None]
        if not colored or any(pm.slot is None for pm in colored):
            raise MixerError(f"{strategy} partition needs pair- and slot-labelled partials")
        colors = _pair_colors(colored)
        if strategy == "color":
            key = lambda pm: (colors[pm.pair], pm.slot)
        elif strategy == "color-parity":
            if any(pm.slot_class is None for pm in colored):
                raise MixerError("color-parity needs slot parity classes")
            key = lambda pm: (colors[pm.pair], pm.slot_class)
        else:
            key = lambda pm: (pm.slot, colors[pm.pair])
        keyed = {}
        for pm in colored:
            keyed.setdefault(key(pm), []).append(pm)
        parts = [sorted(keyed[k], key=lambda p: p.label) for k in sorted(keyed)]
        if rest:
            # leftover partials (slack flips) ride along with the first part when disjoint
            if all(r.commutes_structurally(o) for r in rest for o in parts[0]):
                parts[0] = parts[0] + sorted(rest, key=lambda p: p.label)
            else:
                parts += [[pm] for pm in sorted(rest, key=lambda p: p.label)]
        return OrderedPartition(tuple(tuple(pm.label for pm in part) for part in parts), strategy)
    raise MixerError(f"unknown partition strategy {strategy!r}")


def partition_is_valid(partials, partition: OrderedPartition, n_qubits: int | None = None) -> bool:
    """Each label in exactly one part; parts commute (structurally, or exactly if n_qubits given)."""
    by_label = {pm.label: pm for pm in partials}
    labels = partition.labels()
    if sorted(labels) != sorted(by_label) or len(set(labels)) != len(labels):
        return False
    for part in partition.parts:
        for x, y in itertools.combinations(part, 2):
            a, b = by_label[x], by_label[y]
            if a.commutes_structurally(b):
                continue
            if n_qubits is None:
                return False
            ha, hb = a.to_sparse(n_qubits), b.to_sparse(n_qubits)
            comm = ha @ hb - hb @ ha
            if comm.nnz and abs(comm).max() >= 1e-12:
                return False
    return True


# --------------------------------------------------------------------------
# realizations
# --------------------------------------------------------------------------


def compile_partial(pm: PartialMixer, k: int, ancilla_base: int,
                    threshold: int | None = ANCILLA_THRESHOLD) -> tuple[list[Gate], int]:
    """Gates for ``exp(-i beta_k H_pm)`` and the number of ancillas used.

    OR-clauses of the control predicate are each computed into an ancilla.
    A plain conjunction with more than ``threshold`` literals is folded into
    one more ancilla; ``threshold=None`` keeps every literal as a direct control.
    """
    if pm.control.unsatisfiable:
        return [], 0
    tg = pm.targets
    if len(tg) == 1 and (pm.a, pm.b) == (0, 1):
        core = ("rx", tg, None, pm.weight)
    elif len(tg) == 2 and {pm.a, pm.b} == {0b01, 0b10}:
        core = ("xy", tg, None, pm.weight / 2)
    else:
        core = ("two_level", tg, (pm.a, pm.b), pm.weight)
    tag = pm.label
    literals = [cl[0] for cl in pm.control.clauses if len(cl) == 1]
    or_clauses = [cl for cl in pm.control.clauses if len(cl) > 1]
    compute: list[Gate] = []
    anc = ancilla_base
    if threshold is None and or_clauses:
        raise MixerError("OR-clause controls need ancillas")
    for cl in or_clauses:
        compute.append(Gate("x", (anc,), tag=tag))
        compute.append(Gate("x", (anc,), tuple((q, 1 - b) for q, b in cl), tag=tag))
        literals.append((anc, 1))
        anc += 1
    if threshold is not None and len(literals) > threshold:
        compute.append(Gate("x", (anc,), tuple(literals), tag=tag))
        literals = [(anc, 1)]
        anc += 1
    kind, targets, patterns, coeff = core
    apply = Gate(kind, targets, tuple(literals), beta(k, coeff), patterns, tag=tag)
    return compute + [apply] + compute[::-1], anc - ancilla_base


def realize_partitioned(spec: MixerSpec, k: int, n_qubits: int) -> tuple[list[Gate], int]:
    """Circuit fragment with role beta(k); returns ``(gates, n_ancilla)``."""
    if spec.family != "partitioned":
        raise MixerError("spec is not partitioned")
    if spec.compile == "add":
        gates = []
        for _ in range(spec.repeats):
            gates += binary_parity_mixer(spec.binary_registers, k)
        return gates, 0
    by_label = {pm.label: pm for pm in spec.partials}
    gates: list[Gate] = []
    n_anc = 0
    for _ in range(spec.repeats):
        for part in spec.partition.parts:
            for lab in part:
                g, used = compile_partial(by_label[lab], k, n_qubits, spec.ancilla_threshold)
                gates += g
                n_anc = max(n_anc, used)
    return gates, n_anc


def simultaneous_fragment(spec: MixerSpec, k: int, n_total: int) -> list[Gate]:
    h = spec.hamiltonian(n_total)
    return [Gate("hamiltonian", role=beta(k), payload=h, tag=("simultaneous",))] * spec.repeats


def realize_simultaneous(spec: MixerSpec, beta_value: float, n_qubits: int) -> np.ndarray:
    """Dense ``exp(-i beta sum_j H_j)`` on the encoded register (repeats applied)."""
    u = expm_hermitian(spec.hamiltonian(n_qubits), beta_value)
    return np.linalg.matrix_power(u, spec.repeats) if spec.repeats > 1 else u


def _add_gates(bits: tuple[int, ...], tag) -> list[Gate]:
    """Increment by one modulo 2^l: X on bit k controlled on all lower bits being 1."""
    return [Gate("x", (bits[kk],), tuple((bits[c], 1) for c in range(kk)), tag=tag) for kk in reversed(range(len(bits)))]


def binary_parity_mixer(registers, k: int) -> list[Gate]:
    """ADD(+1), X(beta) on the low bit, ADD(-1), X(beta), for every register in parallel."""
    registers = [tuple(r) for r in registers]
    up = [g for r in registers for g in _add_gates(r, ("add", r))]
    down = [g for r in registers for g in reversed(_add_gates(r, ("sub", r)))]
    rot = [Gate("rx", (r[0],), (), beta(k), tag=("ring-bin", r)) for r in registers]
    return up + rot + down + rot


def make_mixer_spec(partials: list[PartialMixer], kind: str, family: str = "partitioned",
                    strategy: str | None = None, repeats: int = 1, enc: E.Encoding | None = None,
                    ancilla_threshold: int | None = ANCILLA_THRESHOLD) -> MixerSpec:
    if family == "simultaneous":
        return MixerSpec(partials, "simultaneous", None, repeats, kind, ancilla_threshold=ancilla_threshold)
    if kind == "binary-parity" and strategy in (None, "add"):
        regs = tuple(r.qubits for r in enc.registers)
        return MixerSpec(partials, "partitioned", make_partition(partials, "parity"), repeats, kind,
                         compile="add", binary_registers=regs)
    strategy = strategy or default_strategy(kind, partials)
    return MixerSpec(partials, "partitioned", make_partition(partials, strategy), repeats, kind,
                     ancilla_threshold=ancilla_threshold)


def default_strategy(kind: str, partials) -> str:
    if kind in ("ring", "rnv", "fully-connected", "binary-parity"):
        return "parity"
    if kind == "ordering-swap":
        return "color-parity"
    if kind == "time-swap":
        return "time-color"
    return "greedy-commuting"
