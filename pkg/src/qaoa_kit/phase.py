"""Phase separators: diagonal operators exp(-i gamma g) with g affine in f.

A separator is a list of ``PhaseTerm`` entries ``c * Z_S * [controls hold]``;
the phase function is their sum.  Terms whose predicate has many controls can
be routed through an ancilla (compute, phase, uncompute).
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from . import encoding as E
from . import problems as P
from .graphs import Graph, misra_gries_edge_coloring
from .state import DiagonalTable, Gate, gamma

Poly = dict  # frozenset[int] -> float


class PhaseError(ValueError):
    pass


@dataclass(frozen=True)
class Affine:
    """``g = scale * f + offset`` on the feasible subspace."""

    scale: float
    offset: float

    def apply(self, f):
        return self.scale * np.asarray(f, dtype=float) + self.offset


@dataclass(frozen=True)
class PhaseTerm:
    coeff: float
    zs: tuple[int, ...] = ()
    controls: tuple[tuple[int, int], ...] = ()
    via_ancilla: bool = False

    def values(self, idx: np.ndarray) -> np.ndarray:
        out = np.full(idx.shape, float(self.coeff))
        for q in self.zs:
            out *= 1 - 2 * ((idx >> q) & 1)
        for q, b in self.controls:
            out *= ((idx >> q) & 1) == b
        return out


@dataclass
class PhaseSeparator:
    n_qubits: int
    affine: Affine
    terms: tuple[PhaseTerm, ...] = ()
    table: DiagonalTable | None = None  # set for diagonal-phase-by-function separators
    mode: str = "encoded"
    note: str = ""
    expected: dict = field(default_factory=dict)

    @property
    def n_ancilla(self) -> int:
        return sum(1 for t in self.terms if t.via_ancilla)

    @property
    def gate_built(self) -> bool:
        return self.table is None

    def g(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        if self.table is not None:
            return self.table(idx)
        out = np.zeros(idx.shape)
        for t in self.terms:
            out += t.values(idx)
        return out

    def fragment(self, k: int, ancilla_base: int | None = None) -> list[Gate]:
        """Gates realizing ``exp(-i gamma_k H_g)``."""
        if self.table is not None:
            n_total = self.n_qubits if ancilla_base is None else ancilla_base
            return [Gate("diag", role=gamma(k), payload=_tiled(self.table, self.n_qubits, n_total), tag=("phase",))]
        base = self.n_qubits if ancilla_base is None else ancilla_base
        gates: list[Gate] = []
        anc = base
        compute, apply, uncompute = [], [], []
        for t in self.terms:
            kind = "rz" if len(t.zs) == 1 else "multi_z"
            tag = ("phase", t.zs, t.controls)
            if t.via_ancilla:
                c = Gate("x", (anc,), t.controls, tag=tag)
                compute.append(c)
                apply.append(Gate(kind, t.zs, ((anc, 1),), gamma(k, t.coeff), tag=tag))
                uncompute.append(c)
                anc += 1
            else:
                gates.append(Gate(kind, t.zs, t.controls, gamma(k, t.coeff), tag=tag))
        return gates + compute + apply + uncompute[::-1]


def _tiled(table: DiagonalTable, n_comp: int, n_total: int) -> DiagonalTable:
    if n_total == n_comp:
        return table
    mask = (1 << n_comp) - 1
    return DiagonalTable(n_total, fn=lambda idx: table(idx & mask))


# --------------------------------------------------------------------------
# pseudo-Boolean algebra
# --------------------------------------------------------------------------


def poly_add(a: Poly, b: Poly, scale: float = 1.0) -> Poly:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0.0) + scale * v
    return {k: v for k, v in out.items() if v != 0}


def poly_mul(a: Poly, b: Poly, vanishes=None) -> Poly:
    """Multilinear product; ``vanishes(monomial)`` marks products that are 0 on codewords."""
    out: dict = defaultdict(float)
    for ka, va in a.items():
        for kb, vb in b.items():
            m = ka | kb
            if vanishes is not None and vanishes(m):
                continue
            out[m] += va * vb
    return {k: v for k, v in out.items() if v != 0}


def poly_eval(poly: Poly, bits: np.ndarray) -> np.ndarray:
    """Evaluate on index array ``bits`` (bit q of each index is variable q)."""
    bits = np.asarray(bits, dtype=np.int64)
    out = np.zeros(bits.shape)
    for mono, c in poly.items():
        v = np.full(bits.shape, float(c))
        for q in mono:
            v *= (bits >> q) & 1
        out += v
    return out


def z_eval(z_terms: Poly, idx: np.ndarray) -> np.ndarray:
    idx = np.asarray(idx, dtype=np.int64)
    out = np.zeros(idx.shape)
    for mono, c in z_terms.items():
        v = np.full(idx.shape, float(c))
        for q in mono:
            v *= 1 - 2 * ((idx >> q) & 1)
        out += v
    return out


def pseudo_boolean_to_z_terms(poly: Poly, max_degree: int = 4) -> Poly:
    """Substitute ``x_q = (1 - Z_q) / 2`` and collect Z-monomials."""
    out: dict = defaultdict(float)
    for mono, c in poly.items():
        mono = frozenset(mono)
        if len(mono) > max_degree:
            raise PhaseError(f"degree {len(mono)} exceeds cap {max_degree}")
        w = c / (1 << len(mono))
        for r in range(len(mono) + 1):
            for sub in itertools.combinations(sorted(mono), r):
                out[frozenset(sub)] += w * (-1) ** r
    return {k: v for k, v in out.items() if v != 0}


def affine_reduce(z_terms: Poly, enc: E.Encoding, rescale: float | None = None) -> tuple[Poly, Affine]:
    """Drop terms that are constant on codewords and optionally rescale.

    Drops the identity term and any full one-hot register sum ``c * sum_a Z_a``
    (worth ``c (d - 2)`` on every codeword).  With ``rescale=None`` the result
    is divided by the common coefficient when all survivors share one.
    Returns ``(reduced, affine)`` with ``reduced = scale * original + offset``
    on codewords.
    """
    terms = dict(z_terms)
    dropped = terms.pop(frozenset(), 0.0)
    for reg in enc.onehot_registers():
        coeffs = [terms.get(frozenset({q})) for q in reg.qubits]
        if all(c is not None for c in coeffs) and len(set(coeffs)) == 1:
            d = len(reg.qubits)
            for q in reg.qubits:
                del terms[frozenset({q})]
            dropped += coeffs[0] * (d - 2)
    if rescale is None:
        vals = set(terms.values())
        rescale = 1.0 / vals.pop() if len(vals) == 1 else 1.0
    reduced = {k: v * rescale for k, v in terms.items()}
    return reduced, Affine(rescale, -rescale * dropped)


def _terms_from_z(z_terms: Poly, order_key=None) -> tuple[PhaseTerm, ...]:
    items = sorted(z_terms.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
    if order_key is not None:
        items = sorted(items, key=lambda kv: order_key(tuple(sorted(kv[0]))))
    return tuple(PhaseTerm(c, tuple(sorted(m))) for m, c in items if len(m) > 0)


# --------------------------------------------------------------------------
# per-problem construction
# --------------------------------------------------------------------------


def _semantic(inst: P.Problem, enc: E.Encoding, affine: Affine, note: str = "") -> PhaseSeparator:
    table = np.zeros(1 << enc.n_qubits)
    for cfg in inst.configurations():
        table[enc.encode(cfg)] = affine.scale * inst._objective(cfg) + affine.offset
    return PhaseSeparator(enc.n_qubits, affine, table=DiagonalTable(enc.n_qubits, table=table),
                          mode="semantic", note=note)


def _zz_graph_terms(graph, qubit, coeff_of_edge) -> list[PhaseTerm]:
    colors = misra_gries_edge_coloring(graph)
    order = sorted(range(graph.m), key=lambda i: (colors[graph.edges[i]], i))
    return [PhaseTerm(coeff_of_edge(i), (qubit(graph.edges[i][0]), qubit(graph.edges[i][1]))) for i in order]


def build_phase_separator(inst: P.Problem, enc: E.Encoding, mode: str = "encoded") -> PhaseSeparator:
    """Phase separator for ``inst`` under ``enc``.

    ``mode="semantic"`` returns the diagonal-phase-by-function gate built from
    ``g = scale * f + offset`` with the same affine as the encoded form.
    """
    sep = _encoded(inst, enc)
    if mode == "encoded":
        return sep
    if mode == "semantic":
        return _semantic(inst, enc, sep.affine, note="semantic form of: " + sep.note)
    raise PhaseError(f"unknown phase mode {mode!r}")


def _encoded(inst: P.Problem, enc: E.Encoding) -> PhaseSeparator:
    n = enc.n_qubits

    def need(cls):
        if not isinstance(enc, cls):
            raise PhaseError(f"{inst.kind} phase separator does not support {type(enc).__name__}")

    if isinstance(inst, (P.MaxCut, P.GraphPartitioning)):
        need(E.BitEncoding)
        g = inst.graph
        terms = _zz_graph_terms(g, lambda v: v, g.weight)
        total = sum(g.weight(i) for i in range(g.m))
        return PhaseSeparator(n, Affine(-2.0, total), tuple(terms), note="sum_e w_e Z_u Z_v = W - 2 f")

    if isinstance(inst, P.DirectedMaxCut):
        need(E.BitEncoding)
        g = inst.graph
        z: dict = defaultdict(float)
        for i, (u, v) in enumerate(g.edges):
            w = g.weight(i)
            z[(u,)] += w
            z[(v,)] -= w
            z[(min(u, v), max(u, v))] += w
        singles = [PhaseTerm(c, k) for k, c in sorted(z.items()) if len(k) == 1 and c != 0]
        und = Graph(g.n, tuple({(min(u, v), max(u, v)) for u, v in g.edges}))
        colors = misra_gries_edge_coloring(und)
        pairs = sorted((k for k in z if len(k) == 2 and z[k] != 0), key=lambda k: (colors[k], k))
        total = sum(g.weight(i) for i in range(g.m))
        terms = tuple(singles + [PhaseTerm(z[k], k) for k in pairs])
        return PhaseSeparator(n, Affine(-4.0, total), terms, note="sum w (Z_u - Z_v + Z_u Z_v) = W - 4 f")

    if isinstance(inst, (P.MaxSat, P.MinSat, P.NaeSat, P.SetSplitting)):
        need(E.BitEncoding)
        sep = _semantic(inst, enc, Affine(1.0, 0.0))
        sep.mode = "encoded"
        sep.note = "diagonal phase by clause function, g = f"
        ell = getattr(inst, "ell", None) or max(len(s) for s in inst.subsets)
        m = len(inst.clauses) if hasattr(inst, "clauses") else len(inst.subsets)
        sep.expected = {"symbolic_gate_bound": f"O(m 2^l) with m={m}, l={ell}", "bound_value": m * (2**ell - 1)}
        return sep

    if isinstance(inst, P.E3Lin2):
        need(E.BitEncoding)
        terms = tuple(PhaseTerm(-1.0 if b else 1.0, tuple(vs)) for vs, b in inst.equations)
        m = len(inst.equations)
        return PhaseSeparator(n, Affine(2.0, -m), terms, note="sum (-1)^b Z Z Z = 2 f - m")

    if isinstance(inst, (P.MaxIndependentSet, P.MaxSetPacking, P.MinSetCover)):
        need(E.BitEncoding)
        w = getattr(inst, "vertex_weights", None) or tuple(1.0 for _ in range(n))
        terms = tuple(PhaseTerm(w[q], (q,)) for q in range(n))
        return PhaseSeparator(n, Affine(-2.0, float(sum(w))), terms, note="sum_v w_v Z_v = W - 2 f")

    if isinstance(inst, P.MaxVertexKCover):
        need(E.BitEncoding)
        g = inst.graph
        z: dict = defaultdict(float)
        for i, (u, v) in enumerate(g.edges):
            z[(u,)] += g.weight(i)
            z[(v,)] += g.weight(i)
        singles = [PhaseTerm(c, k) for k, c in sorted(z.items())]
        terms = tuple(singles + _zz_graph_terms(g, lambda v: v, g.weight))
        total = sum(g.weight(i) for i in range(g.m))
        return PhaseSeparator(n, Affine(-4.0, 3 * total), terms, note="sum w (Z_u + Z_v + Z_u Z_v) = 3W - 4 f")

    if isinstance(inst, P.MaxColorableSubgraph):
        g, k = inst.graph, inst.kappa
        if isinstance(enc, E.OneHotEncoding):
            poly: Poly = {}
            for i, (u, v) in enumerate(g.edges):
                poly = poly_add(poly, {frozenset(): g.weight(i)})
                for a in range(k):
                    poly = poly_add(poly, {frozenset({enc.qubit(u, a), enc.qubit(v, a)}): -g.weight(i)})
            z = pseudo_boolean_to_z_terms(poly)
            reduced, aff = affine_reduce(z, enc, rescale=-4.0)
            colors = misra_gries_edge_coloring(g)
            edge_of = {}
            for i, (u, v) in enumerate(g.edges):
                for a in range(k):
                    edge_of[(enc.qubit(u, a), enc.qubit(v, a))] = (colors[(u, v)], a, i)
            terms = tuple(PhaseTerm(c, tuple(sorted(m))) for m, c in
                          sorted(reduced.items(), key=lambda kv: edge_of[tuple(sorted(kv[0]))]))
            return PhaseSeparator(n, aff, terms, note="sum_e sum_a Z_ua Z_va = k m - 4 f")
        if isinstance(enc, E.BinaryEncoding):
            terms = []
            for i, (u, v) in enumerate(g.edges):
                for a in range(k):
                    ctrl = tuple((enc.qubit(u, b), (a >> b) & 1) for b in range(enc.l))
                    ctrl += tuple((enc.qubit(v, b), (a >> b) & 1) for b in range(enc.l))
                    terms.append(PhaseTerm(g.weight(i), (), ctrl))
            total = sum(g.weight(i) for i in range(g.m))
            return PhaseSeparator(n, Affine(-1.0, total), tuple(terms),
                                  note="sum_e w_e [x_u == x_v] = W - f via controlled phases")
        raise PhaseError("unsupported encoding for MaxColorableSubgraph")

    if isinstance(inst, P.MaxColorableInducedSubgraph):
        need(E.OneHotEncoding)
        terms = tuple(PhaseTerm(1.0, (enc.qubit(v, 0),)) for v in range(inst.graph.n))
        return PhaseSeparator(n, Affine(2.0, -float(inst.graph.n)), terms, note="sum_v Z_v0 = 2 f - n")

    if isinstance(inst, P.MinGraphColoring):
        need(E.OneHotEncoding)
        terms = tuple(
            PhaseTerm(1.0, (), tuple((enc.qubit(v, a), 0) for v in range(inst.graph.n)), via_ancilla=True)
            for a in range(inst.kappa)
        )
        return PhaseSeparator(n, Affine(-1.0, float(inst.kappa)), terms,
                              note="sum_a NONE(a) = kappa - f, one ancilla per color")

    if isinstance(inst, P.TSP):
        need(E.DirectOneHotEncoding)
        dist = inst.distances
        nn = inst.n_items
        if not inst.fix_first:
            terms = []
            for i in range(nn):
                j = (i + 1) % nn
                for u in range(nn):
                    for v in range(nn):
                        if u != v:
                            terms.append(PhaseTerm(dist[u][v], (enc.qubit(u, i), enc.qubit(v, j))))
            dsum = sum(dist[u][v] for u in range(nn) for v in range(nn) if u != v)
            return PhaseSeparator(n, Affine(4.0, (nn - 4) * dsum), tuple(terms),
                                  note="sum_i sum_{u!=v} d(u,v) Z_ui Z_v(i+1) = 4 f + (n-4) D")
        poly: Poly = {}
        for i in range(1, nn - 1):
            for u in range(1, nn):
                for v in range(1, nn):
                    if u != v:
                        poly = poly_add(poly, {frozenset({enc.qubit(u, i), enc.qubit(v, i + 1)}): dist[u][v]})
        for u in range(1, nn):
            poly = poly_add(poly, {frozenset({enc.qubit(u, 1)}): dist[0][u]})
            poly = poly_add(poly, {frozenset({enc.qubit(u, nn - 1)}): dist[u][0]})
        reduced, aff = affine_reduce(pseudo_boolean_to_z_terms(poly), enc, rescale=1.0)
        return PhaseSeparator(n, aff, _terms_from_z(reduced), note="pseudo-Boolean tour length, city 0 pinned")

    if isinstance(inst, P.SmsTotalTardiness):
        need(E.AbsoluteOneHotEncoding)
        terms = []
        for j in range(inst.n_items):
            for t in range(max(0, inst.d[j] - inst.p[j] + 1), enc.horizon - inst.p[j] + 1):
                terms.append(PhaseTerm(inst.w[j] * (t + inst.p[j] - inst.d[j]), (enc.qubit(j, t),)))
        total = sum(t.coeff for t in terms)
        return PhaseSeparator(n, Affine(-2.0, total), tuple(terms), note="sum w (t + p - d) Z_jt = C - 2 f")

    if isinstance(inst, P.SmsReleaseDates):
        need(E.WindowOneHotEncoding)
        terms = []
        for j in range(inst.n_items):
            lo = max(inst.r[j], inst.d[j] - inst.p[j] + 1)
            for t in range(lo, inst.horizon - inst.p[j] + 1):
                terms.append(PhaseTerm(inst.w[j] * (t + inst.p[j] - inst.d[j]), (enc.qubit(j, t),)))
            cost = inst.w[j] * inst.buffer_cost(j)
            if cost:
                terms.append(PhaseTerm(cost, (enc.qubit(j, inst.buffers[j]),)))
        total = sum(t.coeff for t in terms)
        return PhaseSeparator(n, Affine(-2.0, total), tuple(terms),
                              note="sum w (t + p - d) Z_jt + buffer terms = C - 2 f")

    if isinstance(inst, P.SmsSquaredTardiness):
        need(E.ProductEncoding)
        poly = squared_tardiness_polynomial(inst, enc)
        reduced, aff = affine_reduce(pseudo_boolean_to_z_terms(poly), enc, rescale=1.0)
        return PhaseSeparator(n, aff, _terms_from_z(reduced), note="pseudo-Boolean squared tardiness with slack")

    raise PhaseError(f"no phase separator for {inst.kind}")


def squared_tardiness_polynomial(inst: P.SmsSquaredTardiness, enc: E.ProductEncoding) -> Poly:
    """``sum_j w_j (s_j + p_j - d_j + y_j)^2`` over ordering bits and slack bits.

    Products that vanish on permutation matrices (two slots of one job, or
    two jobs in one slot) are removed, which keeps the degree at 3.
    """
    order_enc, slack_enc = enc.parts
    n = inst.n_items
    slack_off = enc.offsets[1]
    q = order_enc.qubit
    owner = {}
    for j in range(n):
        for i in range(n):
            owner[q(j, i)] = (j, i)

    def vanishes(m):
        jobs, slots = {}, {}
        for x in m:
            if x in owner:
                j, i = owner[x]
                if jobs.setdefault(j, i) != i or slots.setdefault(i, j) != j:
                    return True
        return False

    total: Poly = {}
    for j in range(n):
        lin: Poly = {frozenset(): float(inst.p[j] - inst.d[j])}
        for a in range(1, n):  # job j at slot a starts after every job in slots < a
            for k in range(n):
                if k == j:
                    continue
                for b in range(a):
                    lin = poly_add(lin, {frozenset({q(j, a), q(k, b)}): float(inst.p[k])})
        for bit in range(slack_enc.widths[j]):
            lin = poly_add(lin, {frozenset({slack_off + slack_enc.offsets[j] + bit}): float(1 << bit)})
        total = poly_add(total, poly_mul(lin, lin, vanishes), inst.w[j])
    return total
