"""Problem instances: configuration spaces, objectives, feasibility, reductions.

Indices are 0-based throughout: vertices ``0..n-1``, colors ``0..k-1``, cities
``0..n-1``, jobs ``0..n-1``.  SAT literals follow the DIMACS convention
(``+k`` is variable ``k-1``, ``-k`` its negation).

Configurations are plain tuples:

* bit and dit strings: ``tuple[int, ...]``;
* orderings: ``iota`` with ``iota[i]`` the item placed at slot ``i``;
* SMS with slack: ``(ordering, slack)``;
* release-date schedules: start times, with a job's buffer slot ``b_j`` meaning
  "not scheduled".
"""
from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, ClassVar, Iterator

import numpy as np

from .graphs import Graph

MAXIMIZE = "maximize"
MINIMIZE = "minimize"
BRUTE_FORCE_CAP = 10**7


class ConfigurationError(ValueError):
    """A configuration does not belong to the instance's configuration space."""


class Problem:
    kind: ClassVar[str] = ""
    sense: ClassVar[str] = MAXIMIZE
    reduction_only: ClassVar[bool] = False

    def configurations(self) -> Iterator[tuple]:
        raise NotImplementedError

    def configuration_count(self) -> int:
        raise NotImplementedError

    def check(self, cfg) -> tuple:
        raise NotImplementedError

    def _objective(self, cfg) -> float:
        raise NotImplementedError

    def _feasible(self, cfg) -> bool:
        return True

    def objective(self, cfg) -> float:
        return float(self._objective(self.check(cfg)))

    def is_feasible(self, cfg) -> bool:
        return bool(self._feasible(self.check(cfg)))

    def payload(self) -> dict:
        raise NotImplementedError

    def fingerprint(self) -> str:
        blob = json.dumps({"problem": self.kind, "data": self.payload()}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def better(self, a: float, b: float) -> bool:
        return a > b if self.sense == MAXIMIZE else a < b


# --------------------------------------------------------------------------
# configuration-space mixins
# --------------------------------------------------------------------------


class _BitSpace(Problem):
    @property
    def n_bits(self) -> int:
        raise NotImplementedError

    def configurations(self):
        return itertools.product((0, 1), repeat=self.n_bits)

    def configuration_count(self):
        return 2**self.n_bits

    def check(self, cfg):
        cfg = tuple(int(b) for b in cfg)
        if len(cfg) != self.n_bits or any(b not in (0, 1) for b in cfg):
            raise ConfigurationError(f"{self.kind} expects {self.n_bits} bits, got {cfg}")
        return cfg


class _DitSpace(Problem):
    @property
    def n_dits(self) -> int:
        raise NotImplementedError

    @property
    def alphabet(self) -> int:
        raise NotImplementedError

    def configurations(self):
        return itertools.product(range(self.alphabet), repeat=self.n_dits)

    def configuration_count(self):
        return self.alphabet**self.n_dits

    def check(self, cfg):
        cfg = tuple(int(c) for c in cfg)
        if len(cfg) != self.n_dits or any(not 0 <= c < self.alphabet for c in cfg):
            raise ConfigurationError(f"{self.kind} expects {self.n_dits} values in [0, {self.alphabet}), got {cfg}")
        return cfg


class _OrderingSpace(Problem):
    @property
    def n_items(self) -> int:
        raise NotImplementedError

    def configurations(self):
        return itertools.permutations(range(self.n_items))

    def configuration_count(self):
        return math.factorial(self.n_items)

    def check(self, cfg):
        cfg = tuple(int(c) for c in cfg)
        if sorted(cfg) != list(range(self.n_items)):
            raise ConfigurationError(f"{self.kind} expects a permutation of 0..{self.n_items - 1}, got {cfg}")
        return cfg


def _graph_payload(g: Graph) -> dict:
    out = {"n": g.n, "edges": [list(e) for e in g.edges]}
    if g.weights is not None:
        out["weights"] = list(g.weights)
    return out


# --------------------------------------------------------------------------
# bit-flip family
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MaxCut(_BitSpace):
    graph: Graph
    kind: ClassVar[str] = "MaxCut"

    @property
    def n_bits(self):
        return self.graph.n

    def _objective(self, x):
        return sum(self.graph.weight(i) for i, (u, v) in enumerate(self.graph.edges) if x[u] != x[v])

    def payload(self):
        return _graph_payload(self.graph)


@dataclass(frozen=True)
class DirectedMaxCut(_BitSpace):
    """Weight of arcs leaving the set ``{v : x_v = 1}``."""

    graph: Graph
    kind: ClassVar[str] = "DirectedMaxCut"

    def __post_init__(self):
        if not self.graph.directed:
            raise ValueError("DirectedMaxCut needs a directed graph")

    @property
    def n_bits(self):
        return self.graph.n

    def _objective(self, x):
        return sum(self.graph.weight(i) for i, (u, v) in enumerate(self.graph.edges) if x[u] == 1 and x[v] == 0)

    def payload(self):
        return _graph_payload(self.graph)


def _literal_value(x, lit: int) -> int:
    v = x[abs(lit) - 1]
    return v if lit > 0 else 1 - v


@dataclass(frozen=True)
class _ClauseProblem(_BitSpace):
    n_vars: int
    clauses: tuple[tuple[int, ...], ...]
    ell: int | None = None

    def __post_init__(self):
        cl = tuple(tuple(int(l) for l in c) for c in self.clauses)
        object.__setattr__(self, "clauses", cl)
        ell = self.ell if self.ell is not None else max((len(c) for c in cl), default=0)
        object.__setattr__(self, "ell", ell)
        for c in cl:
            if not c or len(c) > ell:
                raise ValueError(f"clause {c} must have 1..{ell} literals")
            if any(l == 0 or abs(l) > self.n_vars for l in c):
                raise ValueError(f"clause {c} references an undeclared variable")

    @property
    def n_bits(self):
        return self.n_vars

    def clause_value(self, x, c) -> int:
        return int(any(_literal_value(x, l) for l in c))

    def _objective(self, x):
        return sum(self.clause_value(x, c) for c in self.clauses)

    def payload(self):
        return {"n": self.n_vars, "clauses": [list(c) for c in self.clauses], "ell": self.ell}


@dataclass(frozen=True)
class MaxSat(_ClauseProblem):
    kind: ClassVar[str] = "MaxSAT"


@dataclass(frozen=True)
class MinSat(_ClauseProblem):
    kind: ClassVar[str] = "MinSAT"
    sense: ClassVar[str] = MINIMIZE


@dataclass(frozen=True)
class NaeSat(_ClauseProblem):
    kind: ClassVar[str] = "NAESAT"

    def clause_value(self, x, c):
        vals = {_literal_value(x, l) for l in c}
        return int(len(vals) == 2)


@dataclass(frozen=True)
class SetSplitting(_BitSpace):
    n: int
    subsets: tuple[tuple[int, ...], ...]
    kind: ClassVar[str] = "SetSplitting"
    reduction_only: ClassVar[bool] = True

    def __post_init__(self):
        object.__setattr__(self, "subsets", tuple(tuple(sorted(int(e) for e in s)) for s in self.subsets))
        for s in self.subsets:
            if not s or any(not 0 <= e < self.n for e in s):
                raise ValueError(f"subset {s} outside universe 0..{self.n - 1}")

    @property
    def n_bits(self):
        return self.n

    def _objective(self, x):
        return sum(1 for s in self.subsets if len({x[e] for e in s}) == 2)

    def payload(self):
        return {"n": self.n, "subsets": [list(s) for s in self.subsets]}


@dataclass(frozen=True)
class E3Lin2(_BitSpace):
    """Equations ``x_a + x_b + x_c = b (mod 2)``; counts satisfied equations."""

    n: int
    equations: tuple[tuple[tuple[int, int, int], int], ...]
    kind: ClassVar[str] = "E3Lin2"

    def __post_init__(self):
        eqs = tuple((tuple(int(a) for a in vs), int(b)) for vs, b in self.equations)
        for vs, b in eqs:
            if len(vs) != 3 or len(set(vs)) != 3 or any(not 0 <= a < self.n for a in vs):
                raise ValueError(f"equation {vs} needs 3 distinct variables in 0..{self.n - 1}")
            if b not in (0, 1):
                raise ValueError("right-hand side must be 0 or 1")
        object.__setattr__(self, "equations", eqs)

    @property
    def n_bits(self):
        return self.n

    def _objective(self, x):
        return sum(1 for vs, b in self.equations if (x[vs[0]] + x[vs[1]] + x[vs[2]]) % 2 == b)

    def payload(self):
        return {"n": self.n, "equations": [[list(vs), b] for vs, b in self.equations]}


# --------------------------------------------------------------------------
# subset problems
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MaxIndependentSet(_BitSpace):
    graph: Graph
    vertex_weights: tuple[float, ...] | None = None
    kind: ClassVar[str] = "MaxIndependentSet"

    @property
    def n_bits(self):
        return self.graph.n

    def _feasible(self, x):
        return not any(x[u] and x[v] for u, v in self.graph.edges)

    def _objective(self, x):
        if self.vertex_weights is None:
            return sum(x)
        return sum(w for w, b in zip(self.vertex_weights, x) if b)

    def payload(self):
        out = _graph_payload(self.graph)
        if self.vertex_weights is not None:
            out["vertex_weights"] = list(self.vertex_weights)
        return out


@dataclass(frozen=True)
class MaxClique(_BitSpace):
    graph: Graph
    kind: ClassVar[str] = "MaxClique"
    reduction_only: ClassVar[bool] = True

    @property
    def n_bits(self):
        return self.graph.n

    def _feasible(self, x):
        chosen = [v for v in range(self.graph.n) if x[v]]
        return all(self.graph.has_edge(u, v) for u, v in itertools.combinations(chosen, 2))

    def _objective(self, x):
        return sum(x)

    def payload(self):
        return _graph_payload(self.graph)


@dataclass(frozen=True)
class MinVertexCover(_BitSpace):
    graph: Graph
    kind: ClassVar[str] = "MinVertexCover"
    sense: ClassVar[str] = MINIMIZE
    reduction_only: ClassVar[bool] = True

    @property
    def n_bits(self):
        return self.graph.n

    def _feasible(self, x):
        return all(x[u] or x[v] for u, v in self.graph.edges)

    def _objective(self, x):
        return sum(x)

    def payload(self):
        return _graph_payload(self.graph)


@dataclass(frozen=True)
class _SetSystem(_BitSpace):
    """Bit ``j`` selects subset ``j`` of the universe ``0..n-1``."""

    n: int
    subsets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "subsets", tuple(tuple(sorted(int(e) for e in s)) for s in self.subsets))
        for s in self.subsets:
            if any(not 0 <= e < self.n for e in s):
                raise ValueError(f"subset {s} outside universe 0..{self.n - 1}")

    @property
    def n_bits(self):
        return len(self.subsets)

    def _objective(self, x):
        return sum(x)

    def payload(self):
        return {"n": self.n, "subsets": [list(s) for s in self.subsets]}


@dataclass(frozen=True)
class MaxSetPacking(_SetSystem):
    kind: ClassVar[str] = "MaxSetPacking"

    def constraint_graph(self) -> Graph:
        m = len(self.subsets)
        edges = [(i, j) for i, j in itertools.combinations(range(m), 2) if set(self.subsets[i]) & set(self.subsets[j])]
        return Graph(m, tuple(edges))

    def _feasible(self, x):
        seen: set[int] = set()
        for j, b in enumerate(x):
            if b:
                if seen & set(self.subsets[j]):
                    return False
                seen |= set(self.subsets[j])
        return True


@dataclass(frozen=True)
class MinSetCover(_SetSystem):
    kind: ClassVar[str] = "MinSetCover"
    sense: ClassVar[str] = MINIMIZE

    def _feasible(self, x):
        covered = set()
        for j, b in enumerate(x):
            if b:
                covered |= set(self.subsets[j])
        return len(covered) == self.n


# --------------------------------------------------------------------------
# Hamming-weight problems
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class _WeightedSubset(_BitSpace):
    graph: Graph

    @property
    def n_bits(self):
        return self.graph.n

    @property
    def target_weight(self) -> int:
        raise NotImplementedError

    def _feasible(self, x):
        return sum(x) == self.target_weight

    def _cut(self, x):
        return sum(self.graph.weight(i) for i, (u, v) in enumerate(self.graph.edges) if x[u] != x[v])

    def payload(self):
        return _graph_payload(self.graph)


@dataclass(frozen=True)
class GraphPartitioning(_WeightedSubset):
    kind: ClassVar[str] = "GraphPartitioning"
    sense: ClassVar[str] = MINIMIZE

    def __post_init__(self):
        if self.graph.n % 2:
            raise ValueError("GraphPartitioning needs an even vertex count")

    @property
    def target_weight(self):
        return self.graph.n // 2

    def _objective(self, x):
        return self._cut(x)


@dataclass(frozen=True)
class MaxBisection(GraphPartitioning):
    kind: ClassVar[str] = "MaxBisection"
    sense: ClassVar[str] = MAXIMIZE


@dataclass(frozen=True)
class MaxVertexKCover(_WeightedSubset):
    """Choose exactly ``k`` vertices; count edges with at least one chosen endpoint."""

    k: int = 1
    kind: ClassVar[str] = "MaxVertexKCover"

    def __post_init__(self):
        if not 0 <= self.k <= self.graph.n:
            raise ValueError("k out of range")

    @property
    def target_weight(self):
        return self.k

    def _objective(self, x):
        return sum(self.graph.weight(i) for i, (u, v) in enumerate(self.graph.edges) if x[u] or x[v])

    def payload(self):
        return {**_graph_payload(self.graph), "k": self.k}


# --------------------------------------------------------------------------
# coloring problems
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MaxColorableSubgraph(_DitSpace):
    """Number (or weight) of properly colored edges under a kappa-coloring."""

    graph: Graph
    kappa: int = 3
    kind: ClassVar[str] = "MaxColorableSubgraph"

    @property
    def n_dits(self):
        return self.graph.n

    @property
    def alphabet(self):
        return self.kappa

    def _objective(self, x):
        return sum(self.graph.weight(i) for i, (u, v) in enumerate(self.graph.edges) if x[u] != x[v])

    def payload(self):
        return {**_graph_payload(self.graph), "kappa": self.kappa}


@dataclass(frozen=True)
class MaxColorableInducedSubgraph(_DitSpace):
    """Value 0 means uncolored; colors are 1..kappa.  Counts colored vertices."""

    graph: Graph
    kappa: int = 2
    kind: ClassVar[str] = "MaxColorableInducedSubgraph"

    @property
    def n_dits(self):
        return self.graph.n

    @property
    def alphabet(self):
        return self.kappa + 1

    def _feasible(self, x):
        return not any(x[u] and x[u] == x[v] for u, v in self.graph.edges)

    def _objective(self, x):
        return sum(1 for c in x if c)

    def payload(self):
        return {**_graph_payload(self.graph), "kappa": self.kappa}


@dataclass(frozen=True)
class MinGraphColoring(_DitSpace):
    """Number of colors used by a proper coloring; alphabet defaults to D_G + 2."""

    graph: Graph
    kappa: int | None = None
    kind: ClassVar[str] = "MinGraphColoring"
    sense: ClassVar[str] = MINIMIZE

    def __post_init__(self):
        if self.kappa is None:
            object.__setattr__(self, "kappa", self.graph.max_degree + 2)

    @property
    def n_dits(self):
        return self.graph.n

    @property
    def alphabet(self):
        return self.kappa

    def _feasible(self, x):
        return not any(x[u] == x[v] for u, v in self.graph.edges)

    def _objective(self, x):
        return len(set(x))

    def payload(self):
        return {**_graph_payload(self.graph), "kappa": self.kappa}


@dataclass(frozen=True)
class MinCliqueCover(_DitSpace):
    """Label vertices so every label class is a clique; minimize labels used."""

    graph: Graph
    kappa: int | None = None
    kind: ClassVar[str] = "MinCliqueCover"
    sense: ClassVar[str] = MINIMIZE
    reduction_only: ClassVar[bool] = True

    def __post_init__(self):
        if self.kappa is None:
            object.__setattr__(self, "kappa", self.graph.complement().max_degree + 2)

    @property
    def n_dits(self):
        return self.graph.n

    @property
    def alphabet(self):
        return self.kappa

    def _feasible(self, x):
        return all(self.graph.has_edge(u, v) for u, v in itertools.combinations(range(self.graph.n), 2) if x[u] == x[v])

    def _objective(self, x):
        return len(set(x))

    def payload(self):
        return {**_graph_payload(self.graph), "kappa": self.kappa}


@dataclass(frozen=True)
class MinEdgeColoring(_DitSpace):
    """Color edges so touching edges differ; minimize colors used."""

    graph: Graph
    kappa: int | None = None
    kind: ClassVar[str] = "MinEdgeColoring"
    sense: ClassVar[str] = MINIMIZE
    reduction_only: ClassVar[bool] = True

    def __post_init__(self):
        if self.kappa is None:
            object.__setattr__(self, "kappa", self.graph.line_graph().max_degree + 2)

    @property
    def n_dits(self):
        return self.graph.m

    @property
    def alphabet(self):
        return self.kappa

    def _feasible(self, x):
        for i, j in itertools.combinations(range(self.graph.m), 2):
            if x[i] == x[j] and set(self.graph.edges[i]) & set(self.graph.edges[j]):
                return False
        return True

    def _objective(self, x):
        return len(set(x))

    def payload(self):
        return {**_graph_payload(self.graph), "kappa": self.kappa}


# --------------------------------------------------------------------------
# orderings and schedules
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TSP(_OrderingSpace):
    """Closed tour length; ``fix_first`` pins city 0 to slot 0."""

    distances: tuple[tuple[float, ...], ...]
    fix_first: bool = False
    kind: ClassVar[str] = "TSP"
    sense: ClassVar[str] = MINIMIZE

    def __post_init__(self):
        d = tuple(tuple(float(v) for v in row) for row in self.distances)
        n = len(d)
        if n < 2 or any(len(row) != n for row in d):
            raise ValueError("distance matrix must be square with n >= 2")
        object.__setattr__(self, "distances", d)

    @property
    def n_items(self):
        return len(self.distances)

    def configurations(self):
        for perm in itertools.permutations(range(self.n_items)):
            if not self.fix_first or perm[0] == 0:
                yield perm

    def configuration_count(self):
        return math.factorial(self.n_items - (1 if self.fix_first else 0))

    def check(self, cfg):
        cfg = super().check(cfg)
        if self.fix_first and cfg[0] != 0:
            raise ConfigurationError("city 0 must occupy slot 0")
        return cfg

    def _objective(self, iota):
        n = len(iota)
        return sum(self.distances[iota[i]][iota[(i + 1) % n]] for i in range(n))

    def payload(self):
        return {"distances": [list(r) for r in self.distances], "fix_first": self.fix_first}


def packed_starts(order, p) -> tuple[int, ...]:
    """Start times of jobs processed back to back in ``order`` from time 0."""
    s = [0] * len(p)
    t = 0
    for j in order:
        s[j] = t
        t += p[j]
    return tuple(s)


def _int_vector(v, name) -> tuple[int, ...]:
    out = tuple(int(a) for a in v)
    if any(a < 0 for a in out) or any(float(a) != float(b) for a, b in zip(out, v)):
        raise ValueError(f"{name} must be nonnegative integers")
    return out


@dataclass(frozen=True)
class _Sms(Problem):
    p: tuple[int, ...]
    d: tuple[int, ...]
    w: tuple[float, ...] | None = None
    sense: ClassVar[str] = MINIMIZE

    def __post_init__(self):
        object.__setattr__(self, "p", _int_vector(self.p, "p"))
        object.__setattr__(self, "d", _int_vector(self.d, "d"))
        if len(self.d) != len(self.p):
            raise ValueError("p and d lengths differ")
        w = tuple(1.0 for _ in self.p) if self.w is None else tuple(float(a) for a in self.w)
        if len(w) != len(self.p):
            raise ValueError("w length differs")
        object.__setattr__(self, "w", w)
        if any(a == 0 for a in self.p):
            raise ValueError("processing times must be positive")

    @property
    def n_items(self):
        return len(self.p)

    @property
    def horizon(self) -> int:
        return sum(self.p)

    def tardiness(self, order) -> tuple[int, ...]:
        s = packed_starts(order, self.p)
        return tuple(max(0, s[j] + self.p[j] - self.d[j]) for j in range(self.n_items))

    def payload(self):
        return {"p": list(self.p), "d": list(self.d), "w": list(self.w)}


@dataclass(frozen=True)
class SmsTotalTardiness(_Sms, _OrderingSpace):
    kind: ClassVar[str] = "SMSTotalTardiness"

    def _objective(self, order):
        return sum(w * t for w, t in zip(self.w, self.tardiness(order)))


@dataclass(frozen=True)
class SmsSquaredTardiness(_Sms):
    """Configurations are ``(ordering, slack)``; slack ``y_j`` lives in ``[0, 2**mu_j)``."""

    kind: ClassVar[str] = "SMSSquaredTardiness"

    @cached_property
    def slack_bits(self) -> tuple[int, ...]:
        return tuple(math.ceil(math.log2(max(dj - pj, 0) + 1)) for pj, dj in zip(self.p, self.d))

    def configurations(self):
        slack_space = itertools.product(*(range(1 << mu) for mu in self.slack_bits))
        orders = list(itertools.permutations(range(self.n_items)))
        for y in slack_space:
            for o in orders:
                yield (o, y)

    def configuration_count(self):
        return math.factorial(self.n_items) * (1 << sum(self.slack_bits))

    def check(self, cfg):
        try:
            order, y = cfg
        except (TypeError, ValueError):
            raise ConfigurationError("expected (ordering, slack)") from None
        order = tuple(int(a) for a in order)
        y = tuple(int(a) for a in y)
        if sorted(order) != list(range(self.n_items)):
            raise ConfigurationError(f"bad ordering {order}")
        if len(y) != self.n_items or any(not 0 <= yj < 1 << mu for yj, mu in zip(y, self.slack_bits)):
            raise ConfigurationError(f"slack {y} outside its registers")
        return (order, y)

    def _objective(self, cfg):
        order, y = cfg
        s = packed_starts(order, self.p)
        return sum(w * (s[j] + self.p[j] - self.d[j] + y[j]) ** 2 for j, w in enumerate(self.w))

    def squared_tardiness(self, order) -> float:
        return sum(w * t * t for w, t in zip(self.w, self.tardiness(order)))


@dataclass(frozen=True)
class SmsReleaseDates(_Sms):
    """Weighted tardiness with release dates; unscheduled jobs sit in a buffer slot.

    Job ``j`` may start anywhere in its window ``[r_j, h - p_j]`` or occupy its
    buffer slot ``b_j = h + sum(p[:j])``.  A buffered job costs
    ``buffer_cost * w_j`` where ``buffer_cost`` is ``b_j - d_j`` unless a
    constant ``buffer_phase`` is given.
    """

    r: tuple[int, ...] = ()
    horizon_override: int | None = None
    buffer_phase: float | None = None
    kind: ClassVar[str] = "SMSReleaseDates"

    def __post_init__(self):
        super().__post_init__()
        r = _int_vector(self.r, "r") if self.r else tuple(0 for _ in self.p)
        if len(r) != len(self.p):
            raise ValueError("r length differs")
        object.__setattr__(self, "r", r)

    @property
    def horizon(self) -> int:
        if self.horizon_override is not None:
            return int(self.horizon_override)
        return max(max(self.d), max(self.r)) + sum(self.p)

    @cached_property
    def windows(self) -> tuple[tuple[int, ...], ...]:
        h = self.horizon
        return tuple(tuple(range(self.r[j], h - self.p[j] + 1)) for j in range(self.n_items))

    @cached_property
    def buffers(self) -> tuple[int, ...]:
        h = self.horizon
        return tuple(h + sum(self.p[:j]) for j in range(self.n_items))

    def buffer_cost(self, j: int) -> float:
        return float(self.buffer_phase) if self.buffer_phase is not None else float(self.buffers[j] - self.d[j])

    def slots(self, j: int) -> tuple[int, ...]:
        return self.windows[j] + (self.buffers[j],)

    def configurations(self):
        return itertools.product(*(self.slots(j) for j in range(self.n_items)))

    def configuration_count(self):
        return int(np.prod([len(self.slots(j)) for j in range(self.n_items)]))

    def check(self, cfg):
        cfg = tuple(int(a) for a in cfg)
        if len(cfg) != self.n_items or any(s not in self.slots(j) for j, s in enumerate(cfg)):
            raise ConfigurationError(f"schedule {cfg} outside the job windows and buffers")
        return cfg

    def scheduled(self, cfg) -> list[int]:
        return [j for j, s in enumerate(cfg) if s != self.buffers[j]]

    def _feasible(self, s):
        jobs = self.scheduled(s)
        for i, j in itertools.combinations(jobs, 2):
            if s[i] < s[j] + self.p[j] and s[j] < s[i] + self.p[i]:
                return False
        return True

    def _objective(self, s):
        total = 0.0
        for j in range(self.n_items):
            if s[j] == self.buffers[j]:
                total += self.w[j] * self.buffer_cost(j)
            else:
                total += self.w[j] * max(0, s[j] + self.p[j] - self.d[j])
        return total

    def greedy_schedule(self) -> tuple[int, ...]:
        """Earliest-release-date list schedule."""
        order = sorted(range(self.n_items), key=lambda j: (self.r[j], j))
        s = [0] * self.n_items
        t = 0
        for j in order:
            t = max(t, self.r[j])
            s[j] = t
            t += self.p[j]
        return tuple(s)

    def payload(self):
        out = {**super().payload(), "r": list(self.r)}
        if self.horizon_override is not None:
            out["horizon"] = self.horizon_override
        if self.buffer_phase is not None:
            out["buffer_phase"] = self.buffer_phase
        return out


# --------------------------------------------------------------------------
# generic operations
# --------------------------------------------------------------------------


def objective(inst: Problem, cfg) -> float:
    return inst.objective(cfg)


def is_feasible(inst: Problem, cfg) -> bool:
    return inst.is_feasible(cfg)


def feasible_configurations(inst: Problem) -> Iterator[tuple]:
    for cfg in inst.configurations():
        if inst._feasible(cfg):
            yield cfg


def brute_force_optimum(inst: Problem) -> tuple[float, list[tuple]]:
    """Exact optimum and the sorted list of optimal feasible configurations."""
    if inst.configuration_count() > BRUTE_FORCE_CAP:
        raise ValueError(f"configuration space exceeds {BRUTE_FORCE_CAP}")
    best = None
    arg: list[tuple] = []
    for cfg in feasible_configurations(inst):
        val = float(inst._objective(cfg))
        if best is None or inst.better(val, best):
            best, arg = val, [cfg]
        elif val == best:
            arg.append(cfg)
    if best is None:
        raise ValueError("instance has no feasible configuration")
    return best, sorted(arg)


@dataclass(frozen=True)
class Reduction:
    """Image instance plus the maps back to the source problem."""

    source: Problem
    image: Problem
    pull_back: Callable[[tuple], tuple]
    value_back: Callable[[float], float]
    note: str = ""


def _identity(x):
    return x


def reduction(inst: Problem) -> Reduction:
    if isinstance(inst, MaxClique):
        return Reduction(inst, MaxIndependentSet(inst.graph.complement()), _identity, _identity,
                         "cliques of G are independent sets of its complement")
    if isinstance(inst, MinVertexCover):
        n = inst.graph.n
        return Reduction(inst, MaxIndependentSet(inst.graph), lambda x: tuple(1 - b for b in x),
                         lambda v: n - v, "cover = complement of an independent set; |C| = n - |I|")
    if isinstance(inst, MinCliqueCover):
        return Reduction(inst, MinGraphColoring(inst.graph.complement(), inst.kappa), _identity, _identity,
                         "clique covers of G are proper colorings of its complement")
    if isinstance(inst, SetSplitting):
        clauses = tuple(tuple(e + 1 for e in s) for s in inst.subsets)
        return Reduction(inst, NaeSat(inst.n, clauses), _identity, _identity,
                         "a subset is split iff its clause is not-all-equal")
    if isinstance(inst, MinEdgeColoring):
        return Reduction(inst, MinGraphColoring(inst.graph.line_graph(), inst.kappa), _identity, _identity,
                         "edge colorings of G are vertex colorings of its line graph")
    raise ValueError(f"no reduction declared for {inst.kind}")


def reduce(inst: Problem) -> Problem:
    return reduction(inst).image


# --------------------------------------------------------------------------
# construction from payloads
# --------------------------------------------------------------------------

KIND_ALIASES = {
    "Max-ℓ-SAT": "MaxSAT", "Max-l-SAT": "MaxSAT", "MaxSat": "MaxSAT",
    "Min-ℓ-SAT": "MinSAT", "Min-l-SAT": "MinSAT", "MinSat": "MinSAT",
    "NAE-ℓ-SAT": "NAESAT", "NAE-l-SAT": "NAESAT", "NaeSat": "NAESAT",
    "MIS": "MaxIndependentSet",
    "Max-κ-ColorableSubgraph": "MaxColorableSubgraph", "Max-k-ColorableSubgraph": "MaxColorableSubgraph",
    "MaxVertex-κ-Cover": "MaxVertexKCover", "MaxVertex-k-Cover": "MaxVertexKCover",
    "Max-κ-ColorableInducedSubgraph": "MaxColorableInducedSubgraph",
    "Max-k-ColorableInducedSubgraph": "MaxColorableInducedSubgraph",
    "SMS-SquaredTardiness": "SMSSquaredTardiness", "SMS-TotalTardiness": "SMSTotalTardiness",
    "SMS-ReleaseDates": "SMSReleaseDates",
}

PROBLEM_TYPES: dict[str, type[Problem]] = {
    cls.kind: cls
    for cls in (MaxCut, DirectedMaxCut, MaxSat, MinSat, NaeSat, SetSplitting, E3Lin2, MaxIndependentSet,
                MaxClique, MinVertexCover, MaxSetPacking, MinSetCover, MaxColorableSubgraph, GraphPartitioning,
                MaxBisection, MaxVertexKCover, MaxColorableInducedSubgraph, MinGraphColoring, MinCliqueCover,
                MinEdgeColoring, TSP, SmsSquaredTardiness, SmsTotalTardiness, SmsReleaseDates)
}

_GRAPH_KINDS = {"MaxCut", "DirectedMaxCut", "MaxIndependentSet", "MaxClique", "MinVertexCover",
                "MaxColorableSubgraph", "GraphPartitioning", "MaxBisection", "MaxVertexKCover",
                "MaxColorableInducedSubgraph", "MinGraphColoring", "MinCliqueCover", "MinEdgeColoring"}


def canonical_kind(kind: str) -> str:
    k = KIND_ALIASES.get(kind, kind)
    if k not in PROBLEM_TYPES:
        raise KeyError(f"unknown problem kind {kind!r}")
    return k


def graph_from_payload(data: dict, directed: bool = False) -> Graph:
    return Graph(int(data["n"]), tuple(tuple(e) for e in data.get("edges", [])),
                 tuple(data["weights"]) if data.get("weights") is not None else None, directed)


def from_payload(kind: str, data: dict) -> Problem:
    """Build an instance from a JSON-style payload (see README for schemas)."""
    kind = canonical_kind(kind)
    cls = PROBLEM_TYPES[kind]
    if kind in _GRAPH_KINDS:
        g = graph_from_payload(data, directed=(kind == "DirectedMaxCut"))
        if kind in ("MaxColorableSubgraph", "MaxColorableInducedSubgraph"):
            return cls(g, int(data["kappa"]))
        if kind in ("MinGraphColoring", "MinCliqueCover", "MinEdgeColoring"):
            return cls(g, int(data["kappa"]) if data.get("kappa") is not None else None)
        if kind == "MaxVertexKCover":
            return cls(g, int(data["k"]))
        if kind == "MaxIndependentSet" and data.get("vertex_weights") is not None:
            return cls(g, tuple(float(w) for w in data["vertex_weights"]))
        return cls(g)
    if kind in ("MaxSAT", "MinSAT", "NAESAT"):
        return cls(int(data["n"]), tuple(tuple(c) for c in data["clauses"]), data.get("ell"))
    if kind in ("SetSplitting", "MaxSetPacking", "MinSetCover"):
        return cls(int(data["n"]), tuple(tuple(s) for s in data["subsets"]))
    if kind == "E3Lin2":
        return cls(int(data["n"]), tuple((tuple(vs), int(b)) for vs, b in data["equations"]))
    if kind == "TSP":
        return cls(tuple(tuple(r) for r in data["distances"]), bool(data.get("fix_first", False)))
    w = tuple(data["w"]) if data.get("w") is not None else None
    if kind == "SMSReleaseDates":
        return cls(tuple(data["p"]), tuple(data["d"]), w, tuple(data.get("r", ())),
                   data.get("horizon"), data.get("buffer_phase"))
    return cls(tuple(data["p"]), tuple(data["d"]), w)
