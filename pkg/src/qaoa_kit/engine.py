"""Statevector execution, expectations, sampling and angle search."""
from __future__ import annotations

import itertools
import math
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import encoding as E
from . import problems as P
from .circuit import Circuit
from .state import apply_gate_inplace, zero_state

GAMMA_RANGE = (0.0, 2 * math.pi)
BETA_RANGE = (0.0, math.pi)
GRID_CAP = 10**6


class EngineError(ValueError):
    pass


@dataclass(frozen=True)
class QaoaSchedule:
    gammas: tuple[float, ...]
    betas: tuple[float, ...]
    beta0: float | None = None  # angle of an optional leading mixer

    def __post_init__(self):
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        if len(self.gammas) != len(self.betas):
            raise EngineError("gammas and betas must have equal length")

    @property
    def p(self) -> int:
        return len(self.gammas)

    @classmethod
    def from_vector(cls, v, beta0=None) -> "QaoaSchedule":
        v = list(v)
        p = len(v) // 2
        return cls(tuple(v[:p]), tuple(v[p:]), beta0)

    def vector(self) -> tuple[float, ...]:
        return self.gammas + self.betas

    def padded(self, p: int) -> "QaoaSchedule":
        """Zero-padded to level ``p``; the extra layers act as the identity."""
        extra = p - self.p
        if extra < 0:
            raise EngineError("cannot pad to a smaller level")
        return QaoaSchedule(self.gammas + (0.0,) * extra, self.betas + (0.0,) * extra, self.beta0)

    def angles(self) -> dict[tuple[str, int], float]:
        out = {("gamma", k + 1): g for k, g in enumerate(self.gammas)}
        out.update({("beta", k + 1): b for k, b in enumerate(self.betas)})
        if self.beta0 is not None:
            out[("beta", 0)] = self.beta0
        return out

    def to_dict(self) -> dict:
        out = {"p": self.p, "gammas": list(self.gammas), "betas": list(self.betas)}
        if self.beta0 is not None:
            out["beta0"] = self.beta0
        return out


def simulate(circuit: Circuit, schedule: QaoaSchedule, backend: str | None = None) -> np.ndarray:
    """Exact statevector from |0...0> over all qubits (ancillas included)."""
    angles = schedule.angles()
    missing = [r for r in circuit.roles if r not in angles]
    if missing:
        raise EngineError(f"schedule does not cover roles {sorted(missing)}")
    psi = zero_state(circuit.n_qubits).reshape(-1, 1)
    for g in circuit.gates:
        apply_gate_inplace(psi, g, angles, backend)
    return psi.reshape(-1)


# --------------------------------------------------------------------------
# objective tables and expectations
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ObjectiveTable:
    """Feasible codeword indices with their objective values."""

    indices: np.ndarray
    values: np.ndarray
    configs: tuple
    n_comp: int

    @classmethod
    def build(cls, inst: P.Problem, enc: E.Encoding) -> "ObjectiveTable":
        rows = []
        for cfg in inst.configurations():
            if inst._feasible(cfg):
                rows.append((enc.encode(cfg), float(inst._objective(cfg)), cfg))
                if len(rows) > E.FEASIBLE_CAP:
                    raise EngineError("feasible set too large for exact expectation")
        rows.sort(key=lambda r: r[0])
        return cls(np.array([r[0] for r in rows], dtype=np.int64), np.array([r[1] for r in rows]),
                   tuple(r[2] for r in rows), enc.n_qubits)

    def probabilities(self, state: np.ndarray) -> np.ndarray:
        probs = np.abs(np.asarray(state)) ** 2
        return probs[self.indices]  # ancillas are the high bits, so ancilla-0 amplitudes sit first

    def expectation(self, state: np.ndarray) -> tuple[float, float]:
        """``(<f> over codewords, infeasible mass)``; <f> is normalized by the total mass."""
        pf = self.probabilities(state)
        total = float(np.sum(np.abs(state) ** 2))
        mass = float(pf.sum())
        value = float(pf @ self.values) / total if total else 0.0
        return value, max(0.0, total - mass)


def expectation(state: np.ndarray, inst: P.Problem, enc: E.Encoding, table: ObjectiveTable | None = None) -> float:
    table = table or ObjectiveTable.build(inst, enc)
    return table.expectation(state)[0]


def infeasible_mass(state: np.ndarray, inst: P.Problem, enc: E.Encoding, table: ObjectiveTable | None = None) -> float:
    table = table or ObjectiveTable.build(inst, enc)
    return table.expectation(state)[1]


def sample(state: np.ndarray, shots: int, seed, enc: E.Encoding | None = None, n_comp: int | None = None) -> list:
    """I.i.d. measurement outcomes.

    Without ``enc`` the raw basis indices are returned; with it each index is
    decoded (``None`` for non-codewords or nonzero ancillas).
    """
    if shots < 1:
        raise EngineError("shots must be >= 1")
    probs = np.abs(np.asarray(state)) ** 2
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    idx = rng.choice(probs.shape[0], size=shots, p=probs)
    if enc is None:
        return [int(i) for i in idx]
    n = enc.n_qubits if n_comp is None else n_comp
    out = []
    for i in idx:
        i = int(i)
        out.append(enc.decode(i) if i >> n == 0 else None)
    return out


def approximation_ratio(value: float, inst: P.Problem, optimum: float | None = None) -> float:
    """<f>/OPT when maximizing, OPT/<f> when minimizing."""
    opt = P.brute_force_optimum(inst)[0] if optimum is None else optimum
    if inst.sense == P.MAXIMIZE:
        if opt == 0:
            raise EngineError("approximation ratio undefined for a zero optimum")
        return value / opt
    if value == 0:
        raise EngineError("approximation ratio undefined for a zero expectation")
    return opt / value


# --------------------------------------------------------------------------
# evaluation and optimizers
# --------------------------------------------------------------------------


def worker_count() -> int:
    raw = os.environ.get("QAOA_KIT_THREADS", "").strip()
    cap = os.cpu_count() or 1
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise EngineError(f"QAOA_KIT_THREADS must be an integer, got {raw!r}") from None
    return max(1, min(n, cap))


@dataclass
class Evaluator:
    """Maps angle vectors to expectations for one circuit; counts evaluations."""

    circuit: Circuit
    inst: P.Problem
    enc: E.Encoding
    backend: str | None = None
    table: ObjectiveTable | None = None
    calls: int = 0
    beta0: float | None = None

    def __post_init__(self):
        if self.table is None:
            self.table = ObjectiveTable.build(self.inst, self.enc)

    @property
    def sign(self) -> float:
        return 1.0 if self.inst.sense == P.MAXIMIZE else -1.0

    def value(self, schedule: QaoaSchedule) -> float:
        self.calls += 1
        return self.table.expectation(simulate(self.circuit, schedule, self.backend))[0]

    def score(self, vec) -> float:
        """Larger is better regardless of the optimization sense."""
        return self.sign * self.value(QaoaSchedule.from_vector(vec, self.beta0))

    def scores(self, vecs: list) -> list[float]:
        workers = worker_count()
        if workers <= 1 or len(vecs) < 2:
            return [self.score(v) for v in vecs]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(self.score, vecs))


@dataclass
class OptimizeResult:
    schedule: QaoaSchedule
    value: float
    evaluations: int
    strategy: str
    trace: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"schedule": self.schedule.to_dict(), "value": self.value, "evaluations": self.evaluations,
                "strategy": self.strategy}


def _better(s1: float, v1: tuple, s2: float | None, v2: tuple | None) -> bool:
    """Higher score wins; exact ties go to the lexicographically smaller angle vector."""
    if s2 is None:
        return True
    if s1 != s2:
        return s1 > s2
    return v1 < v2


def _reduce(vecs, scores, best=None):
    bs, bv = best if best is not None else (None, None)
    for v, s in zip(vecs, scores):
        v = tuple(float(x) for x in v)
        if _better(s, v, bs, bv):
            bs, bv = s, v
    return bs, bv


def grid_vectors(p: int, points: int, gamma_range=GAMMA_RANGE, beta_range=BETA_RANGE) -> list[tuple]:
    """Row-major grid over (gamma_1..gamma_p, beta_1..beta_p); upper ends excluded."""
    if points < 1:
        raise EngineError("grid needs at least one point per axis")
    total = points ** (2 * p)
    if total > GRID_CAP:
        raise EngineError(f"grid of {total} points exceeds {GRID_CAP}")
    gs = np.linspace(*gamma_range, points, endpoint=False)
    bs = np.linspace(*beta_range, points, endpoint=False)
    axes = [gs] * p + [bs] * p
    return [tuple(float(x) for x in v) for v in itertools.product(*axes)]


def _bounds(p, gamma_range, beta_range):
    return [gamma_range] * p + [beta_range] * p


def _random_start(rng, p, gamma_range, beta_range):
    return tuple(float(rng.uniform(lo, hi)) for lo, hi in _bounds(p, gamma_range, beta_range))


def _pattern_search(ev: Evaluator, start, score, budget, bounds, step0=None):
    x = tuple(start)
    step = list(step0 or [(hi - lo) / 4 for lo, hi in bounds])
    used = 0
    while used < budget and max(step) > 1e-9:
        improved = False
        for i in range(len(x)):
            for sgn in (1, -1):
                if used >= budget:
                    break
                y = list(x)
                y[i] += sgn * step[i]
                y = tuple(y)
                s = ev.score(y)
                used += 1
                if s > score:
                    x, score, improved = y, s, True
                    break
        if not improved:
            step = [h / 2 for h in step]
    return x, score, used


def _coordinate_descent(ev: Evaluator, start, score, iters, bounds, line_points=16):
    x = list(start)
    for _ in range(iters):
        before = score
        for i, (lo, hi) in enumerate(bounds):
            pts = np.linspace(lo, hi, line_points, endpoint=False)
            cand = []
            for t in pts:
                y = list(x)
                y[i] = float(t)
                cand.append(tuple(y))
            scores = ev.scores(cand)
            s_best, v_best = _reduce(cand, scores)
            h = (hi - lo) / line_points
            c = v_best[i]

            def neg(t, i=i):
                y = list(x)
                y[i] = float(t)
                return -ev.score(tuple(y))

            res = minimize_scalar(neg, bounds=(c - h, c + h), method="bounded", options={"xatol": 1e-10})
            y = list(x)
            y[i] = float(res.x)
            s_ref = -float(res.fun)
            if _better(s_ref, tuple(y), s_best, v_best):
                s_best, v_best = s_ref, tuple(y)
            if _better(s_best, v_best, score, tuple(x)):
                x, score = list(v_best), s_best
        if score - before <= 1e-12:
            break
    return tuple(x), score


def optimize(circuit: Circuit, inst: P.Problem, enc: E.Encoding, strategy: str = "grid", seed=0, *,
             grid_points: int = 16, budget: int = 2000, restarts: int = 2, iters: int = 10,
             gamma_range=GAMMA_RANGE, beta_range=BETA_RANGE, warm_starts=(), refine: bool = False,
             backend: str | None = None, table: ObjectiveTable | None = None) -> OptimizeResult:
    """Search the 2p angles.

    Warm starts (schedules, zero-padded if shorter) are always evaluated and
    compete with the strategy's own candidates.  ``refine`` runs a pattern
    search from the best grid point with the grid spacing as first step.
    """
    p = circuit.p
    ev = Evaluator(circuit, inst, enc, backend, table)
    bounds = _bounds(p, gamma_range, beta_range)
    seeds = [s.padded(p).vector() if isinstance(s, QaoaSchedule) else tuple(s) for s in warm_starts]
    best = _reduce(seeds, ev.scores(seeds)) if seeds else None
    rng = np.random.default_rng(seed)

    if strategy == "grid":
        vecs = grid_vectors(p, grid_points, gamma_range, beta_range)
        best = _reduce(vecs, ev.scores(vecs), best)
        if refine:
            step = [(hi - lo) / grid_points for lo, hi in bounds]
            x, s, _ = _pattern_search(ev, best[1], best[0], budget, bounds, step)
            best = _reduce([x], [s], best)
    elif strategy == "coordinate-descent":
        starts = list(seeds) + [_random_start(rng, p, gamma_range, beta_range) for _ in range(restarts)]
        for st in starts:
            x, s = _coordinate_descent(ev, st, ev.score(st), iters, bounds)
            best = _reduce([x], [s], best)
    elif strategy == "pattern-search":
        starts = list(seeds) + [_random_start(rng, p, gamma_range, beta_range) for _ in range(max(restarts, 1))]
        per = max(1, budget // len(starts))
        for st in starts:
            x, s, _ = _pattern_search(ev, st, ev.score(st), per, bounds)
            best = _reduce([x], [s], best)
    else:
        raise EngineError(f"unknown optimizer {strategy!r}")
    score, vec = best
    return OptimizeResult(QaoaSchedule.from_vector(vec), ev.sign * score, ev.calls, strategy)


@dataclass
class RunResult:
    expectation: float
    infeasible_mass: float
    best_sampled: tuple | None
    best_sampled_value: float | None
    samples: Counter
    schedule: QaoaSchedule
    seed: int


def run(circuit: Circuit, inst: P.Problem, enc: E.Encoding, schedule: QaoaSchedule, shots: int, seed,
        backend: str | None = None, table: ObjectiveTable | None = None) -> RunResult:
    table = table or ObjectiveTable.build(inst, enc)
    psi = simulate(circuit, schedule, backend)
    value, leak = table.expectation(psi)
    draws = sample(psi, shots, seed, enc, circuit.n_comp)
    counts = Counter(draws)
    best_cfg, best_val = None, None
    for cfg in sorted((c for c in counts if c is not None), key=repr):
        if not inst._feasible(cfg):
            continue
        v = float(inst._objective(cfg))
        if best_val is None or inst.better(v, best_val):
            best_cfg, best_val = cfg, v
    return RunResult(value, leak, best_cfg, best_val, counts, schedule, int(seed) if seed is not None else None)
