"""Symbolic QAOA circuits, resource counting and a stable text dump."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from . import encoding as E
from . import problems as P
from .mixers import MixerSpec, realize_partitioned, simultaneous_fragment
from .phase import PhaseSeparator
from .state import Gate


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Block:
    name: str  # "prep", "phase", "mixer"
    k: int
    start: int
    stop: int


@dataclass(frozen=True)
class Circuit:
    n_comp: int
    n_ancilla: int
    gates: tuple[Gate, ...]
    roles: frozenset[tuple[str, int]]
    blocks: tuple[Block, ...] = ()
    p: int = 0

    @property
    def n_qubits(self) -> int:
        return self.n_comp + self.n_ancilla

    def __post_init__(self):
        for g in self.gates:
            key = g.role.key
            if key is not None and key not in self.roles:
                raise CircuitError(f"gate role {key} not declared")

    def block_gates(self, name: str, k: int | None = None) -> list[Gate]:
        out = []
        for b in self.blocks:
            if b.name == name and (k is None or b.k == k):
                out += self.gates[b.start:b.stop]
        return out

    def appended(self, gate: Gate) -> "Circuit":
        roles = self.roles | ({gate.role.key} if gate.role.key else set())
        return Circuit(self.n_comp, self.n_ancilla, self.gates + (gate,), frozenset(roles), self.blocks, self.p)


def init_gates(init, enc: E.Encoding) -> list[Gate]:
    """``"plus"`` for a Hadamard layer, ``"zero"`` for nothing, else a configuration or basis index."""
    if isinstance(init, str):
        if init == "plus":
            return [Gate("h", (q,), tag=("prep",)) for q in range(enc.n_qubits)]
        if init == "zero":
            return []
        raise CircuitError(f"unknown init recipe {init!r}")
    idx = init if isinstance(init, (int,)) else enc.encode(init)
    return [Gate("x", (q,), tag=("prep",)) for q in range(enc.n_qubits) if (idx >> q) & 1]


def _mixer_fragment(mixer: MixerSpec, k: int, n_comp: int, n_total: int) -> list[Gate]:
    if mixer.family == "simultaneous":
        return simultaneous_fragment(mixer, k, n_total)
    return realize_partitioned(mixer, k, n_comp)[0]


def assemble_qaoa(inst: P.Problem, enc: E.Encoding, mixer: MixerSpec, sep: PhaseSeparator, init, p: int,
                  leading_mixer: bool = False) -> Circuit:
    """Init preparation, then ``p`` (phase gamma_k, mixer beta_k) blocks.

    With ``leading_mixer`` a mixer block with role beta(0) precedes the first
    phase block.
    """
    if p < 0:
        raise CircuitError("p must be >= 0")
    n = enc.n_qubits
    if sep.n_qubits != n:
        raise CircuitError(f"phase separator acts on {sep.n_qubits} qubits, encoding has {n}")
    for pm in mixer.partials:
        if max(pm.targets + pm.control.qubits, default=-1) >= n:
            raise CircuitError(f"mixer partial {pm.label} exceeds the encoded register")
    mix_anc = 0 if mixer.family == "simultaneous" else realize_partitioned(mixer, 1, n)[1]
    n_anc = max(sep.n_ancilla, mix_anc)
    n_total = n + n_anc

    gates: list[Gate] = []
    blocks: list[Block] = []
    roles: set[tuple[str, int]] = set()

    def add(name, k, frag):
        blocks.append(Block(name, k, len(gates), len(gates) + len(frag)))
        gates.extend(frag)

    add("prep", 0, init_gates(init, enc))
    if leading_mixer:
        add("mixer", 0, _mixer_fragment(mixer, 0, n, n_total))
        roles.add(("beta", 0))
    for k in range(1, p + 1):
        add("phase", k, sep.fragment(k, n if sep.gate_built else n_total))
        add("mixer", k, _mixer_fragment(mixer, k, n, n_total))
        roles |= {("gamma", k), ("beta", k)}
    return Circuit(n, n_anc, tuple(gates), frozenset(roles), tuple(blocks), p)


# --------------------------------------------------------------------------
# resources
# --------------------------------------------------------------------------


def _footprint(g: Gate, n_total: int) -> tuple[int, ...]:
    if g.kind in ("diag", "hamiltonian", "unitary") and not g.targets:
        return tuple(range(n_total))
    return tuple(g.targets) + tuple(q for q, _ in g.controls)


def circuit_depth(gates, n_total: int, exclude: frozenset[int] = frozenset()) -> int:
    """Greedy earliest-layer depth; a gate occupies its targets and controls."""
    level = [0] * n_total
    depth = 0
    for g in gates:
        qs = [q for q in _footprint(g, n_total) if q not in exclude]
        if not qs:
            continue
        lay = 1 + max(level[q] for q in qs)
        for q in qs:
            level[q] = lay
        depth = max(depth, lay)
    return depth


def partial_depth(gates, n_comp: int, n_total: int) -> int:
    """Depth counting each tagged group (one partial mixer with its ancilla work) as one layer."""
    groups: dict = {}
    order = []
    for g in gates:
        key = g.tag
        if key not in groups:
            groups[key] = set()
            order.append(key)
        groups[key] |= {q for q in _footprint(g, n_total) if q < n_comp}
    level = [0] * n_total
    depth = 0
    for key in order:
        qs = groups[key]
        if not qs:
            continue
        lay = 1 + max(level[q] for q in qs)
        for q in qs:
            level[q] = lay
        depth = max(depth, lay)
    return depth


def _count_key(g: Gate) -> str:
    return f"{g.kind}/{len(g.targets) + len(g.controls)}"


@dataclass
class BlockStats:
    n_gates: int
    counts: dict[str, int]
    depth: int
    partial_depth: int
    n_partials: int
    two_qubit_estimate: int


@dataclass
class ResourceReport:
    n_qubits: int
    n_ancilla: int
    counts: dict[str, int]
    depth: int
    blocks: dict[str, BlockStats] = field(default_factory=dict)
    two_qubit_estimate: int = 0  # non-normative: 2(k-1) two-qubit gates per k-qubit gate

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "n_ancilla": self.n_ancilla,
            "counts": dict(sorted(self.counts.items())),
            "depth": self.depth,
            "two_qubit_estimate": self.two_qubit_estimate,
            "two_qubit_estimate_normative": False,
            "blocks": {k: vars(v) | {"counts": dict(sorted(v.counts.items()))} for k, v in self.blocks.items()},
        }


def _two_qubit_estimate(gates) -> int:
    out = 0
    for g in gates:
        k = len(g.targets) + len(g.controls)
        if g.kind in ("diag", "hamiltonian") and not g.targets:
            continue
        out += 2 * (k - 1) if k >= 2 else 0
    return out


def _stats(gates, c: Circuit) -> BlockStats:
    anc = frozenset(range(c.n_comp, c.n_qubits))
    tags = {g.tag for g in gates}
    return BlockStats(
        n_gates=len(gates),
        counts=dict(Counter(_count_key(g) for g in gates)),
        depth=circuit_depth(gates, c.n_qubits),
        partial_depth=partial_depth(gates, c.n_comp, c.n_qubits) if anc or gates else 0,
        n_partials=len(tags),
        two_qubit_estimate=_two_qubit_estimate(gates),
    )


def resource_report(c: Circuit) -> ResourceReport:
    blocks = {}
    for b in c.blocks:
        blocks[f"{b.name}({b.k})" if b.name != "prep" else "prep"] = _stats(c.gates[b.start:b.stop], c)
    return ResourceReport(
        n_qubits=c.n_qubits,
        n_ancilla=c.n_ancilla,
        counts=dict(Counter(_count_key(g) for g in c.gates)),
        depth=circuit_depth(c.gates, c.n_qubits),
        blocks=blocks,
        two_qubit_estimate=_two_qubit_estimate(c.gates),
    )


# --------------------------------------------------------------------------
# text dump
# --------------------------------------------------------------------------


def _fmt_controls(controls) -> str:
    return "[" + ",".join(f"{q}" if b else f"!{q}" for q, b in controls) + "]"


def dump_gate(g: Gate) -> str:
    role = str(g.role) if g.role.key is not None else "fixed"
    coeff = repr(float(g.role.coeff))
    return f"{g.kind.upper()} targets=[{','.join(map(str, g.targets))}] controls={_fmt_controls(g.controls)} role={role} coeff={coeff}"


def dump(c: Circuit) -> str:
    head = f"# qubits={c.n_qubits} ancilla={c.n_ancilla} p={c.p} gates={len(c.gates)}"
    return "\n".join([head] + [dump_gate(g) for g in c.gates]) + "\n"
