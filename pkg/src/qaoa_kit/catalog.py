"""Default (encoding, phase separator, mixer, initial state) pipelines per problem."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from . import encoding as E
from . import mixers as M
from . import problems as P
from .circuit import Circuit, assemble_qaoa
from .graphs import greedy_coloring
from .phase import PhaseSeparator, build_phase_separator


class ConfigError(ValueError):
    """Incompatible pipeline options."""


# problem kind -> (encoding, mixer kind, partition strategy)
DEFAULTS = {
    "MaxCut": ("bit", "x", "singleton"),
    "DirectedMaxCut": ("bit", "x", "singleton"),
    "MaxSAT": ("bit", "x", "singleton"),
    "MinSAT": ("bit", "x", "singleton"),
    "NAESAT": ("bit", "x", "singleton"),
    "E3Lin2": ("bit", "x", "singleton"),
    "MaxIndependentSet": ("bit", "cx", "greedy-commuting"),
    "MaxSetPacking": ("bit", "cx", "greedy-commuting"),
    "MinSetCover": ("bit", "cx", "greedy-commuting"),
    "GraphPartitioning": ("bit", "ring", "parity"),
    "MaxBisection": ("bit", "ring", "parity"),
    "MaxVertexKCover": ("bit", "ring", "parity"),
    "MaxColorableSubgraph": ("onehot", "ring", "parity"),
    "MaxColorableInducedSubgraph": ("onehot", "null-swap", "greedy-commuting"),
    "MinGraphColoring": ("onehot", "controlled-swap", "greedy-commuting"),
    "TSP": ("direct", "ordering-swap", "color-parity"),
    "SMSTotalTardiness": ("absolute", "time-swap", "time-color"),
    "SMSSquaredTardiness": ("direct+slack", "ordering-swap", "color-parity"),
    "SMSReleaseDates": ("window", "null-swap", "greedy-commuting"),
}

# every (problem, encoding, mixer) combination the catalog supports
COMBINATIONS = {
    "MaxCut": [("bit", "x")],
    "DirectedMaxCut": [("bit", "x")],
    "MaxSAT": [("bit", "x")],
    "MinSAT": [("bit", "x")],
    "NAESAT": [("bit", "x")],
    "E3Lin2": [("bit", "x")],
    "MaxIndependentSet": [("bit", "cx")],
    "MaxSetPacking": [("bit", "cx")],
    "MinSetCover": [("bit", "cx")],
    "GraphPartitioning": [("bit", "ring"), ("bit", "fully-connected")],
    "MaxBisection": [("bit", "ring"), ("bit", "fully-connected")],
    "MaxVertexKCover": [("bit", "ring"), ("bit", "fully-connected")],
    "MaxColorableSubgraph": [("onehot", "ring"), ("onehot", "rnv"), ("onehot", "fully-connected"),
                             ("binary", "binary-parity"), ("binary", "binary-x")],
    "MaxColorableInducedSubgraph": [("onehot", "null-swap")],
    "MinGraphColoring": [("onehot", "controlled-swap")],
    "TSP": [("direct", "ordering-swap")],
    "SMSTotalTardiness": [("absolute", "time-swap")],
    "SMSSquaredTardiness": [("direct+slack", "ordering-swap")],
    "SMSReleaseDates": [("window", "null-swap")],
}


def make_encoding(inst: P.Problem, scheme: str) -> E.Encoding:
    k = inst.kind
    if scheme == "bit":
        if not isinstance(inst, P._BitSpace):
            raise ConfigError(f"bit encoding does not apply to {k}")
        return E.BitEncoding(inst.n_bits)
    if scheme in ("onehot", "binary"):
        if not isinstance(inst, P._DitSpace):
            raise ConfigError(f"{scheme} encoding does not apply to {k}")
        cls = E.OneHotEncoding if scheme == "onehot" else E.BinaryEncoding
        return cls(inst.alphabet, inst.n_dits)
    if scheme == "direct" and isinstance(inst, P.TSP):
        return E.DirectOneHotEncoding(inst.n_items, inst.fix_first)
    if scheme == "absolute" and isinstance(inst, P.SmsTotalTardiness):
        return E.AbsoluteOneHotEncoding(inst.p)
    if scheme == "direct+slack" and isinstance(inst, P.SmsSquaredTardiness):
        return E.ProductEncoding([E.DirectOneHotEncoding(inst.n_items), E.SlackEncoding(inst.slack_bits)])
    if scheme == "window" and isinstance(inst, P.SmsReleaseDates):
        return E.WindowOneHotEncoding([inst.slots(j) for j in range(inst.n_items)])
    raise ConfigError(f"encoding {scheme!r} does not apply to {k}")


def default_init(inst: P.Problem, enc: E.Encoding, mixer_kind: str):
    """A feasible, classically trivial starting configuration (or ``"plus"``)."""
    if mixer_kind in ("x", "binary-x") and not isinstance(inst, (P.MaxIndependentSet, P.MaxSetPacking, P.MinSetCover)):
        if isinstance(enc, E.BitEncoding) or (isinstance(enc, E.BinaryEncoding) and enc.d == 1 << enc.l):
            return "plus"
    if isinstance(inst, (P.MaxIndependentSet, P.MaxSetPacking)):
        return (0,) * inst.n_bits
    if isinstance(inst, P.MinSetCover):
        full = (1,) * inst.n_bits
        if not inst._feasible(full):
            raise ConfigError("set cover instance has no cover")
        return full
    if isinstance(inst, P._WeightedSubset):
        k = inst.target_weight
        return (1,) * k + (0,) * (inst.n_bits - k)
    if isinstance(inst, P.MaxColorableSubgraph):
        return tuple(c % inst.kappa for c in greedy_coloring(inst.graph))
    if isinstance(inst, P.MaxColorableInducedSubgraph):
        return (0,) * inst.graph.n
    if isinstance(inst, P.MinGraphColoring):
        cols = greedy_coloring(inst.graph)
        if max(cols) >= inst.kappa:
            raise ConfigError("greedy coloring needs more colors than kappa")
        return cols
    if isinstance(inst, (P.TSP, P.SmsTotalTardiness)):
        return tuple(range(inst.n_items))
    if isinstance(inst, P.SmsSquaredTardiness):
        return (tuple(range(inst.n_items)), (0,) * inst.n_items)
    if isinstance(inst, P.SmsReleaseDates):
        s = inst.greedy_schedule()
        return s if inst._feasible(inst.check(s)) else inst.buffers
    return (0,) * enc.n_qubits


@dataclass
class Pipeline:
    inst: P.Problem
    enc: E.Encoding
    sep: PhaseSeparator
    mixer: M.MixerSpec
    init: object
    options: dict = field(default_factory=dict)
    reduction: P.Reduction | None = None

    @property
    def n_qubits(self) -> int:
        return self.enc.n_qubits

    def circuit(self, p: int, leading_mixer: bool = False) -> Circuit:
        return assemble_qaoa(self.inst, self.enc, self.mixer, self.sep, self.init, p, leading_mixer)

    def fingerprint(self, extra: dict | None = None) -> str:
        blob = {"instance": self.inst.fingerprint(), "problem": self.inst.kind, **self.options, **(extra or {})}
        return hashlib.sha256(json.dumps(blob, sort_keys=True, default=str).encode()).hexdigest()[:16]


def build_pipeline(inst: P.Problem, encoding: str | None = None, mixer: str | None = None,
                   partition: str | None = None, repeats: int = 1, phase_mode: str = "encoded",
                   family: str = "partitioned", r: int = 1, init=None, cyclic: bool = False,
                   ancilla_threshold: int | None = M.ANCILLA_THRESHOLD) -> Pipeline:
    """Assemble encoding, separator and mixer for ``inst`` with catalog defaults.

    Reduction-only problems are mapped to their image first; the returned
    pipeline then acts on the image instance and carries the reduction.
    """
    red = None
    if inst.reduction_only:
        red = P.reduction(inst)
        inst = red.image
    if inst.kind not in DEFAULTS:
        raise ConfigError(f"no pipeline for {inst.kind}")
    d_enc, d_mix, d_part = DEFAULTS[inst.kind]
    scheme = encoding or d_enc
    kind = mixer or d_mix
    if kind in ("binary-parity", "binary-x") and encoding is None:
        scheme = "binary"
    if repeats < 1:
        raise ConfigError("repeats must be >= 1")
    enc = make_encoding(inst, scheme)
    try:
        partials = M.build_partial_mixers(inst, enc, kind, r=r, cyclic=cyclic)
        strategy = partition or (d_part if kind == d_mix else M.default_strategy(kind, partials))
        strategy_arg = None if (kind == "binary-parity" and partition is None) else strategy
        spec = M.make_mixer_spec(partials, kind, family, strategy_arg, repeats, enc, ancilla_threshold)
        sep = build_phase_separator(inst, enc, phase_mode)
    except (M.MixerError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    start = default_init(inst, enc, kind) if init is None else init
    options = {"encoding": scheme, "mixer": kind, "partition": None if family == "simultaneous" else strategy,
               "repeats": repeats, "phase_mode": phase_mode, "family": family, "r": r, "cyclic": cyclic}
    return Pipeline(inst, enc, sep, spec, start, options, red)


def catalog_entries() -> list[tuple[str, str, str]]:
    return [(k, e, m) for k, combos in COMBINATIONS.items() for e, m in combos]


def example_instance(kind: str, encoding: str | None = None, mixer: str | None = None) -> P.Problem:
    """Smallest nontrivial instance used by the catalog-wide checks (at most 14 qubits)."""
    from .graphs import Graph, complete_graph, cycle_graph, path_graph

    if kind == "MaxCut":
        return P.MaxCut(complete_graph(3))
    if kind == "DirectedMaxCut":
        return P.DirectedMaxCut(Graph(3, ((0, 1), (1, 2), (2, 0), (0, 2)), directed=True))
    if kind in ("MaxSAT", "MinSAT", "NAESAT"):
        cls = {"MaxSAT": P.MaxSat, "MinSAT": P.MinSat, "NAESAT": P.NaeSat}[kind]
        return cls(3, ((1, 2), (-1, 3), (-2, -3), (1, -2, 3)))
    if kind == "E3Lin2":
        return P.E3Lin2(4, (((0, 1, 2), 1), ((1, 2, 3), 0), ((0, 1, 3), 1)))
    if kind == "MaxIndependentSet":
        return P.MaxIndependentSet(path_graph(3))
    if kind == "MaxSetPacking":
        return P.MaxSetPacking(4, ((0, 1), (1, 2), (2, 3), (3, 0)))
    if kind == "MinSetCover":
        return P.MinSetCover(3, ((0, 1), (1, 2), (0, 2), (2,)))
    if kind == "GraphPartitioning":
        return P.GraphPartitioning(Graph(4, ((0, 1), (1, 2), (2, 3), (3, 0), (0, 2))))
    if kind == "MaxBisection":
        return P.MaxBisection(Graph(4, ((0, 1), (1, 2), (2, 3), (0, 2))))
    if kind == "MaxVertexKCover":
        return P.MaxVertexKCover(path_graph(4), 2)
    if kind == "MaxColorableSubgraph":
        return P.MaxColorableSubgraph(path_graph(3), 4)
    if kind == "MaxColorableInducedSubgraph":
        return P.MaxColorableInducedSubgraph(path_graph(3), 2)
    if kind == "MinGraphColoring":
        return P.MinGraphColoring(path_graph(2))
    if kind == "TSP":
        return P.TSP(((0, 2, 9), (1, 0, 6), (15, 7, 0)))
    if kind == "SMSTotalTardiness":
        return P.SmsTotalTardiness((1, 1, 2), (1, 2, 2), (1.0, 2.0, 1.0))
    if kind == "SMSSquaredTardiness":
        return P.SmsSquaredTardiness((1, 2), (2, 3))
    if kind == "SMSReleaseDates":
        return P.SmsReleaseDates((1, 1), (1, 2), (1.0, 1.0), (0, 1))
    raise ConfigError(f"no example instance for {kind}")
