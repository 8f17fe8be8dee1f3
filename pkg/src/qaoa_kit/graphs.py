"""Small graph type plus the colorings the circuit builders rely on."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class Graph:
    """Simple graph on vertices ``0..n-1``.

    Undirected edges are stored as sorted pairs; directed ones keep their order.
    ``weights`` is ``None`` for unit weights.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    weights: tuple[float, ...] | None = None
    directed: bool = False

    def __post_init__(self):
        seen = set()
        norm = []
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) outside 0..{self.n - 1}")
            e = (u, v) if self.directed else (min(u, v), max(u, v))
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
            norm.append(e)
        object.__setattr__(self, "edges", tuple(norm))
        if self.weights is not None:
            if len(self.weights) != len(norm):
                raise ValueError("one weight per edge required")
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))

    @property
    def m(self) -> int:
        return len(self.edges)

    def weight(self, i: int) -> float:
        return 1.0 if self.weights is None else self.weights[i]

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        nb = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nb[u].add(v)
            nb[v].add(u)
        return tuple(frozenset(s) for s in nb)

    def neighbors(self, v: int) -> list[int]:
        return sorted(self.adjacency[v])

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def max_degree(self) -> int:
        return max((self.degree(v) for v in range(self.n)), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def complement(self) -> "Graph":
        edges = [(u, v) for u, v in itertools.combinations(range(self.n), 2) if not self.has_edge(u, v)]
        return Graph(self.n, tuple(edges))

    def line_graph(self) -> "Graph":
        """Vertices are edge indices; two are adjacent when the edges share an endpoint."""
        pairs = []
        for i, j in itertools.combinations(range(self.m), 2):
            if set(self.edges[i]) & set(self.edges[j]):
                pairs.append((i, j))
        return Graph(self.m, tuple(pairs))


def complete_graph(n: int) -> Graph:
    return Graph(n, tuple(itertools.combinations(range(n), 2)))


def cycle_graph(n: int) -> Graph:
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def path_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def random_graph(n: int, p: float, rng: np.random.Generator, min_edges: int = 1) -> Graph:
    """Erdos-Renyi graph, resampled until it has at least ``min_edges`` edges."""
    while True:
        edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < p]
        if len(edges) >= min_edges:
            return Graph(n, tuple(edges))


def random_regular_graph(n: int, d: int, rng: np.random.Generator) -> Graph:
    """Random d-regular simple graph via the pairing model with rejection."""
    if (n * d) % 2 or d >= n:
        raise ValueError("no such regular graph")
    for _ in range(10_000):
        stubs = np.repeat(np.arange(n), d)
        rng.shuffle(stubs)
        pairs = stubs.reshape(-1, 2)
        edges = {(min(a, b), max(a, b)) for a, b in pairs if a != b}
        if len(edges) == n * d // 2:
            return Graph(n, tuple(sorted(edges)))
    raise RuntimeError("failed to sample a regular graph")


def greedy_coloring(graph: Graph) -> tuple[int, ...]:
    """First-fit vertex coloring in index order; uses at most D_G + 1 colors."""
    colors: list[int] = []
    for v in range(graph.n):
        taken = {colors[u] for u in graph.adjacency[v] if u < v}
        c = 0
        while c in taken:
            c += 1
        colors.append(c)
    return tuple(colors)


def kn_edge_coloring(n: int) -> list[list[tuple[int, int]]]:
    """Proper edge coloring of K_n by the polygon (round-robin) construction.

    Uses n-1 colors for even n and n for odd n.  Parts are sorted internally and
    ordered by their lowest pair.
    """
    if n < 2:
        raise ValueError("n >= 2 required")
    m = n if n % 2 == 0 else n + 1  # odd n gets a dummy vertex m-1
    hub = m - 1
    parts = []
    for r in range(m - 1):
        part = [(min(r, hub), max(r, hub))]
        for k in range(1, m // 2):
            a, b = (r + k) % (m - 1), (r - k) % (m - 1)
            part.append((min(a, b), max(a, b)))
        part = sorted(p for p in part if p[1] < n)
        parts.append(part)
    parts.sort(key=lambda p: p[0])
    return parts


def misra_gries_edge_coloring(graph: Graph) -> dict[tuple[int, int], int]:
    """Proper edge coloring with at most D_G + 1 colors (Misra & Gries)."""
    ncol = graph.max_degree + 1
    at: list[dict[int, int]] = [dict() for _ in range(graph.n)]  # vertex -> color -> neighbor
    color: dict[tuple[int, int], int] = {}

    def key(a, b):
        return (a, b) if a < b else (b, a)

    def free(v):
        return [c for c in range(ncol) if c not in at[v]]

    def set_color(a, b, c):
        old = color.get(key(a, b))
        if old is not None:
            del at[a][old]
            del at[b][old]
        if c is None:
            color.pop(key(a, b), None)
            return
        color[key(a, b)] = c
        at[a][c] = b
        at[b][c] = a

    def is_fan(u, fan):
        for i in range(1, len(fan)):
            c = color.get(key(u, fan[i]))
            if c is None or c in at[fan[i - 1]]:
                return False
        return True

    for u, v in graph.edges:
        fan = [v]
        in_fan = {v}
        grown = True
        while grown:
            grown = False
            for c in free(fan[-1]):
                w = at[u].get(c)
                if w is not None and w not in in_fan:
                    fan.append(w)
                    in_fan.add(w)
                    grown = True
                    break
        c = free(u)[0]
        d = free(fan[-1])[0]
        if d in at[u]:
            # invert the cd-path starting at u (it begins with a d-edge)
            path = [u]
            want = d
            while want in at[path[-1]]:
                nxt = at[path[-1]][want]
                path.append(nxt)
                want = c if want == d else d
            edges_on_path = [(path[i], path[i + 1], color[key(path[i], path[i + 1])]) for i in range(len(path) - 1)]
            for a, b, _ in edges_on_path:
                set_color(a, b, None)
            for a, b, col in edges_on_path:
                set_color(a, b, c if col == d else d)
        # first fan vertex w with d free whose prefix is still a fan
        k = None
        for i, w in enumerate(fan):
            if d not in at[w] and is_fan(u, fan[: i + 1]):
                k = i
                break
        if k is None:  # pragma: no cover - impossible for a correct implementation
            raise RuntimeError("Misra-Gries invariant violated")
        # rotate the fan prefix
        for i in range(k):
            nxt = color[key(u, fan[i + 1])]
            set_color(u, fan[i + 1], None)
            set_color(u, fan[i], nxt)
        set_color(u, fan[k], d)
    return color
