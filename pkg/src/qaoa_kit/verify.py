"""Oracle checks: feasibility preservation, connectivity, phase affinity, Trotter order, resources."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import encoding as E
from . import problems as P
from .catalog import Pipeline
from .circuit import Circuit, assemble_qaoa, resource_report
from .mixers import MixerSpec, realize_partitioned, realize_simultaneous
from .phase import PhaseSeparator
from .state import apply_gate_inplace

LEAK_TOL = 1e-10
AMP_THRESHOLD = 1e-8
ZERO_AMP = 1e-14
AFFINE_TOL = 1e-9
TROTTER_SLOPE = 1.9
FIXED_BETAS = (0.1, 0.3, math.pi / 4, 1.0, 1.5)
PRESERVE_CAP = 14
CONNECT_CAP = 16


class VerifyError(ValueError):
    pass


@dataclass
class VerificationReport:
    check: str
    fingerprint: str
    status: str  # "pass", "fail" or "inconclusive"
    measured: dict = field(default_factory=dict)
    tolerance: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return {"check": self.check, "fingerprint": self.fingerprint, "status": self.status,
                "measured": self.measured, "tolerance": self.tolerance, "details": self.details}


def beta_samples(seed: int = 0, n_random: int = 15) -> tuple[float, ...]:
    rng = np.random.default_rng(seed)
    draws = rng.uniform(0.0, math.pi / 2, n_random)
    return FIXED_BETAS + tuple(float(b) for b in draws)


def _mixer_gates(spec: MixerSpec, n_comp: int):
    if spec.family == "simultaneous":
        return None, 0
    return realize_partitioned(spec, 1, n_comp)


def apply_mixer(spec: MixerSpec, n_comp: int, columns: np.ndarray, beta_value: float) -> np.ndarray:
    """Apply the mixer at angle beta to a block of computational-register columns.

    Returns the block restricted back to the computational register, with
    any amplitude left on nonzero ancilla states dropped (it counts as leakage).
    """
    gates, n_anc = _mixer_gates(spec, n_comp)
    if gates is None:
        u = realize_simultaneous(spec, beta_value, n_comp)
        return u @ columns
    dim = 1 << (n_comp + n_anc)
    psi = np.zeros((dim, columns.shape[1]), dtype=np.complex128)
    psi[: columns.shape[0]] = columns
    angles = {("beta", 1): beta_value}
    for g in gates:
        apply_gate_inplace(psi, g, angles)
    return psi[: 1 << n_comp]


def _basis_columns(n: int, indices) -> np.ndarray:
    out = np.zeros((1 << n, len(indices)), dtype=np.complex128)
    out[np.asarray(indices, dtype=np.int64), np.arange(len(indices))] = 1.0
    return out


def check_feasibility_preservation(spec: MixerSpec, n_comp: int, feasible, betas=None, seed: int = 0,
                                   fingerprint: str = "", max_qubits: int = PRESERVE_CAP) -> VerificationReport:
    _, n_anc = _mixer_gates(spec, n_comp)
    if n_comp + n_anc > max_qubits:
        raise VerifyError(f"{n_comp + n_anc} qubits exceed the cap {max_qubits}")
    betas = beta_samples(seed) if betas is None else tuple(betas)
    feasible = np.asarray(sorted(feasible), dtype=np.int64)
    cols = _basis_columns(n_comp, feasible)
    worst = 0.0
    worst_beta = None
    for b in betas:
        out = apply_mixer(spec, n_comp, cols, b)
        leak = 1.0 - np.sum(np.abs(out[feasible]) ** 2, axis=0)
        m = float(np.max(leak))
        if m > worst:
            worst, worst_beta = m, b
    status = "pass" if worst < LEAK_TOL else "fail"
    return VerificationReport("feasibility_preservation", fingerprint, status,
                              {"max_leakage": worst, "worst_beta": worst_beta, "n_betas": len(betas),
                               "n_feasible": int(feasible.size)},
                              {"leakage": LEAK_TOL})


def check_connectivity(spec: MixerSpec, n_comp: int, feasible, beta_star: float = math.pi / 4, r_max: int = 64,
                       fingerprint: str = "", max_qubits: int = CONNECT_CAP) -> VerificationReport:
    """Smallest r with |<x|U^r|y>| > threshold for all feasible x, y."""
    _, n_anc = _mixer_gates(spec, n_comp)
    if n_comp + n_anc > max_qubits:
        raise VerifyError(f"{n_comp + n_anc} qubits exceed the cap {max_qubits}")
    if not 1 <= r_max <= 1000:
        raise VerifyError("r_max must lie in 1..1000")
    feasible = np.asarray(sorted(feasible), dtype=np.int64)
    block = _basis_columns(n_comp, feasible)
    best_min = 0.0
    reach = None
    for r in range(1, r_max + 1):
        block = apply_mixer(spec, n_comp, block, beta_star)
        amps = np.abs(block[feasible])
        mn = float(amps.min())
        best_min = max(best_min, mn)
        if mn > AMP_THRESHOLD:
            reach = (amps > AMP_THRESHOLD).astype(int).tolist() if len(feasible) <= 32 else None
            return VerificationReport("connectivity", fingerprint, "pass",
                                      {"r": r, "min_amplitude": mn, "n_feasible": int(feasible.size),
                                       "beta": beta_star},
                                      {"amplitude": AMP_THRESHOLD}, {"reachability": reach})
    status = "inconclusive" if best_min > ZERO_AMP else "fail"
    return VerificationReport("connectivity", fingerprint, status,
                              {"r": None, "min_amplitude": best_min, "n_feasible": int(feasible.size),
                               "beta": beta_star, "r_max": r_max},
                              {"amplitude": AMP_THRESHOLD})


def check_phase_separator(sep: PhaseSeparator, inst: P.Problem, enc: E.Encoding, gammas=(0.7, 1.9),
                          n_random: int = 16, seed: int = 0, fingerprint: str = "",
                          max_qubits: int = PRESERVE_CAP) -> VerificationReport:
    """Diagonality on sampled basis states plus least-squares recovery of (scale, offset)."""
    n = enc.n_qubits
    n_total = n + sep.n_ancilla
    if n_total > max_qubits + 4:
        raise VerifyError(f"{n_total} qubits exceed the cap")
    rows = [(enc.encode(cfg), float(inst._objective(cfg))) for cfg in inst.configurations() if inst._feasible(cfg)]
    rows.sort()
    idx = np.array([r[0] for r in rows], dtype=np.int64)
    f = np.array([r[1] for r in rows])
    rng = np.random.default_rng(seed)
    probe_idx = np.unique(np.concatenate([idx, rng.integers(0, 1 << n, n_random)]))
    cols = _basis_columns(n_total, probe_idx)
    frag_base = n if sep.gate_built else n_total
    off_diag = 0.0
    for gam in gammas:
        psi = cols.copy()
        for g in sep.fragment(1, frag_base):
            apply_gate_inplace(psi, g, {("gamma", 1): gam})
        diag = psi[probe_idx, np.arange(probe_idx.size)]
        off_diag = max(off_diag, float(np.max(1.0 - np.abs(diag) ** 2)))
    # phase recovery at a probe small enough that no phase wraps
    bound = float(np.max(np.abs(sep.g(idx)))) if idx.size else 1.0
    gam = 1.0 / (1.0 + bound)
    psi = _basis_columns(n_total, idx)
    for g in sep.fragment(1, frag_base):
        apply_gate_inplace(psi, g, {("gamma", 1): gam})
    phase = -np.angle(psi[idx, np.arange(idx.size)]) / gam
    measured = {"max_offdiagonal_mass": off_diag, "declared_scale": sep.affine.scale,
                "declared_offset": sep.affine.offset}
    if np.ptp(f) == 0:
        measured.update({"recovered_scale": None, "recovered_offset": None, "degenerate": True})
        ok = off_diag < LEAK_TOL
    else:
        a = np.vstack([f, np.ones_like(f)]).T
        (scale, offset), *_ = np.linalg.lstsq(a, phase, rcond=None)
        resid = float(np.max(np.abs(a @ np.array([scale, offset]) - phase)))
        measured.update({"recovered_scale": float(scale), "recovered_offset": float(offset), "fit_residual": resid})
        ok = (off_diag < LEAK_TOL and resid < AFFINE_TOL and abs(scale - sep.affine.scale) < AFFINE_TOL
              and abs(offset - sep.affine.offset) < AFFINE_TOL * max(1.0, abs(sep.affine.offset)))
    return VerificationReport("phase_separator", fingerprint, "pass" if ok else "fail", measured,
                              {"affine": AFFINE_TOL, "diagonal": LEAK_TOL})


def mixer_matrix(spec: MixerSpec, n_comp: int, beta_value: float) -> np.ndarray:
    """Dense matrix of the mixer on the computational register (ancillas start and end at 0)."""
    return apply_mixer(spec, n_comp, np.eye(1 << n_comp, dtype=np.complex128), beta_value)


def check_trotter_order(spec: MixerSpec, n_comp: int, betas=(0.1, 0.05, 0.025, 0.0125),
                        fingerprint: str = "") -> VerificationReport:
    if spec.family != "partitioned":
        raise VerifyError("Trotter comparison needs a partitioned spec")
    sim = MixerSpec(spec.partials, "simultaneous", None, 1, spec.kind)
    errs = []
    for b in betas:
        u_p = mixer_matrix(spec, n_comp, b)
        u_s = np.linalg.matrix_power(realize_simultaneous(sim, b, n_comp), spec.repeats) if spec.repeats > 1 \
            else realize_simultaneous(sim, b * 1.0, n_comp)
        errs.append(float(np.linalg.norm(u_p - u_s, 2)))
    measured = {"betas": list(betas), "errors": errs}
    if max(errs) < 1e-12:
        measured["slope"] = None
        measured["exact_match"] = True
        return VerificationReport("trotter_order", fingerprint, "pass", measured, {"slope": TROTTER_SLOPE})
    slope = float(np.polyfit(np.log(betas), np.log(errs), 1)[0])
    measured["slope"] = slope
    measured["exact_match"] = False
    status = "pass" if slope >= TROTTER_SLOPE else "fail"
    return VerificationReport("trotter_order", fingerprint, status, measured, {"slope": TROTTER_SLOPE})


# --------------------------------------------------------------------------
# resource audit
# --------------------------------------------------------------------------


def expected_resources(pipe: Pipeline) -> list[tuple[str, str, float]]:
    """Closed-form expectations as ``(quantity, relation, value)`` rows."""
    inst, enc = pipe.inst, pipe.enc
    kind = pipe.options.get("mixer")
    out: list[tuple[str, str, float]] = []
    if isinstance(inst, (P.MaxCut, P.GraphPartitioning)) and not isinstance(inst, P.MaxVertexKCover):
        g = inst.graph
        out += [("phase.multi_z/2", "==", g.m), ("phase.depth", "<=", g.max_degree + 1)]
    if isinstance(inst, P.GraphPartitioning) and kind == "ring":
        n = inst.graph.n
        out += [("mixer.xy/2", "==", n), ("mixer.depth", "==", 2 if n % 2 == 0 else 3)]
    if isinstance(inst, P.MaxColorableSubgraph) and isinstance(enc, E.OneHotEncoding):
        g, k = inst.graph, inst.kappa
        out += [("phase.multi_z/2", "==", g.m * k), ("phase.depth", "<=", g.max_degree + 1)]
        if kind == "ring":
            out += [("mixer.xy/2", "==", g.n * k), ("mixer.depth", "==", 2 if k % 2 == 0 else 3)]
    if isinstance(inst, P.E3Lin2):
        out += [("phase.multi_z/3", "==", len(inst.equations))]
    if isinstance(inst, P.MaxIndependentSet):
        n = inst.graph.n
        out += [("phase.rz/1", "==", n), ("mixer.partials", "==", n)]
    if isinstance(inst, P.MinGraphColoring):
        k, n = inst.kappa, inst.graph.n
        out += [("mixer.partials", "==", k * (k - 1) * n // 2)]
    if isinstance(inst, P.TSP) and not inst.fix_first:
        n = inst.n_items
        out += [("phase.multi_z/2", "==", n * n * (n - 1)),
                ("mixer.two_level/4", "==", (n - 1) * math.comb(n, 2)),
                ("mixer.partial_depth", "<=", 2 * n)]
    if isinstance(inst, P.SmsTotalTardiness):
        n, h = inst.n_items, enc.horizon
        out += [("phase.rz/1", "<=", n * h), ("mixer.partials", "<=", h * math.comb(n, 2))]
    return out


def measured_resources(pipe: Pipeline, p: int = 1) -> dict[str, float]:
    rep = resource_report(pipe.circuit(p))
    out: dict[str, float] = {"total.depth": rep.depth, "total.n_qubits": rep.n_qubits}
    for name in ("phase", "mixer"):
        st = rep.blocks.get(f"{name}(1)")
        if st is None:
            continue
        out[f"{name}.depth"] = st.depth
        out[f"{name}.partial_depth"] = st.partial_depth
        out[f"{name}.partials"] = st.n_partials
        out[f"{name}.gates"] = st.n_gates
        for key, v in st.counts.items():
            out[f"{name}.{key}"] = v
    return out


def audit_resources(pipe: Pipeline, fingerprint: str = "") -> VerificationReport:
    measured = measured_resources(pipe)
    rows = []
    ok = True
    for qty, rel, val in expected_resources(pipe):
        got = measured.get(qty, 0)
        good = got == val if rel == "==" else got <= val
        ok &= good
        rows.append({"quantity": qty, "measured": got, "relation": rel, "expected": val, "match": bool(good)})
    details = {"rows": rows}
    if not rows:
        details["note"] = "no closed-form count for this pipeline"
    return VerificationReport("resource_audit", fingerprint, "pass" if ok else "fail",
                              {"rows_checked": len(rows)}, {}, details | {"measured": measured})


# --------------------------------------------------------------------------
# dense oracle for whole circuits
# --------------------------------------------------------------------------


def dense_circuit_state(circuit: Circuit, angles) -> np.ndarray:
    """Product of explicit gate matrices applied to |0...0> (independent of the kernels)."""
    from .state import gate_matrix

    n = circuit.n_qubits
    psi = np.zeros(1 << n, dtype=np.complex128)
    psi[0] = 1.0
    for g in circuit.gates:
        psi = gate_matrix(g, n, angles) @ psi
    return psi


def pipeline_feasible(pipe: Pipeline) -> list[int]:
    return E.enumerate_feasible(pipe.inst, pipe.enc)


def verify_pipeline(pipe: Pipeline, seed: int = 0, checks=("preservation", "phase", "resources"),
                    connectivity_r: int = 64) -> list[VerificationReport]:
    fp = pipe.fingerprint()
    feas = pipeline_feasible(pipe)
    n = pipe.n_qubits
    out = []
    for c in checks:
        if c == "preservation":
            out.append(check_feasibility_preservation(pipe.mixer, n, feas, seed=seed, fingerprint=fp))
        elif c == "connectivity":
            out.append(check_connectivity(pipe.mixer, n, feas, r_max=connectivity_r, fingerprint=fp))
        elif c == "phase":
            out.append(check_phase_separator(pipe.sep, pipe.inst, pipe.enc, seed=seed, fingerprint=fp))
        elif c == "resources":
            out.append(audit_resources(pipe, fingerprint=fp))
        elif c == "trotter":
            out.append(check_trotter_order(pipe.mixer, n, fingerprint=fp))
        else:
            raise VerifyError(f"unknown check {c!r}")
    return out
