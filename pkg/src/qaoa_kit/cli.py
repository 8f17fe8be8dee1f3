"""Command-line front end: solve, verify, resources, sweep.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 configuration error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

import numpy as np

from . import catalog as C
from . import engine as EN
from . import mixers as M
from . import problems as P
from . import verify as V
from .circuit import dump, resource_report
from .io import InputError, dumps_csv, dumps_json, envelope, load_instance, write_text

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_CONFIG = 0, 1, 2, 3
OPTIMIZERS = ("grid", "coordinate-descent", "pattern-search")
CHECKS = ("preservation", "connectivity", "phase", "trotter", "resources")


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qaoa-kit", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, need_instance=True):
        p.add_argument("--instance", required=need_instance, help="JSON envelope or DIMACS edge list")
        p.add_argument("--problem", help="problem kind (overrides the file; required for DIMACS non-MaxCut)")
        p.add_argument("--kappa", type=int, help="colors for coloring problems read from DIMACS")
        p.add_argument("--k", type=int, help="cover size for MaxVertexKCover read from DIMACS")
        p.add_argument("--encoding")
        p.add_argument("--mixer")
        p.add_argument("--partition")
        p.add_argument("--family", default="partitioned", help="partitioned or simultaneous")
        p.add_argument("--repeats", type=int, default=1)
        p.add_argument("--reach", type=int, default=1, help="reach r of the r-nearby-values mixer")
        p.add_argument("--phase-mode", default="encoded", help="encoded or semantic")
        p.add_argument("-p", type=int, default=1, dest="p")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output path (stdout if omitted)")
        p.add_argument("--format", default=None, help="json or csv")

    s = sub.add_parser("solve", help="optimize angles, sample, report")
    common(s)
    s.add_argument("--optimizer", default="grid")
    s.add_argument("--grid-points", type=int, default=16)
    s.add_argument("--budget", type=int, default=2000)
    s.add_argument("--shots", type=int, default=1000)
    s.add_argument("--refine", action="store_true", help="pattern-search refinement after the grid")
    s.add_argument("--dump-circuit", help="write the gate list to this path")
    s.add_argument("--timing", action="store_true", help="include wall-clock timing (breaks byte-identity)")

    v = sub.add_parser("verify", help="design-criteria and oracle checks")
    common(v, need_instance=False)
    v.add_argument("--checks", default="preservation,phase,resources",
                   help=f"comma list from {','.join(CHECKS)}; empty for none")
    v.add_argument("--catalog", action="store_true", help="run on every catalog entry's example instance")
    v.add_argument("--inject-uncontrolled", action="store_true", help="replace the mixer by plain X rotations")
    v.add_argument("--r-max", type=int, default=64)

    r = sub.add_parser("resources", help="gate counts, depths and closed-form audit")
    common(r)

    w = sub.add_parser("sweep", help="expectation on a parameter grid")
    common(w)
    w.add_argument("--grid-points", type=int, default=8)
    w.add_argument("--gamma-max", type=float, default=EN.GAMMA_RANGE[1])
    w.add_argument("--beta-max", type=float, default=EN.BETA_RANGE[1])
    return ap


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------


def _config(args) -> dict:
    keys = ("command", "instance", "problem", "kappa", "k", "encoding", "mixer", "partition", "family", "repeats",
            "reach", "phase_mode", "p", "optimizer", "grid_points", "budget", "shots", "refine", "checks", "catalog",
            "inject_uncontrolled", "r_max", "gamma_max", "beta_max")
    return {k: getattr(args, k) for k in keys if hasattr(args, k)}


def _fingerprint(cfg: dict, inst: P.Problem | None) -> str:
    blob = {k: v for k, v in cfg.items() if k not in ("instance",)}
    blob["instance_fingerprint"] = inst.fingerprint() if inst is not None else None
    return hashlib.sha256(json.dumps(blob, sort_keys=True).encode()).hexdigest()[:16]


def _load(args) -> P.Problem:
    return load_instance(args.instance, args.problem, {"kappa": args.kappa, "k": args.k})


def _pipeline(args, inst) -> C.Pipeline:
    if args.family not in ("partitioned", "simultaneous"):
        raise C.ConfigError(f"unknown mixer family {args.family!r}")
    if args.phase_mode not in ("encoded", "semantic"):
        raise C.ConfigError(f"unknown phase mode {args.phase_mode!r}")
    if args.mixer is not None and args.mixer not in M.MIXER_KINDS:
        raise C.ConfigError(f"unknown mixer {args.mixer!r}; choose from {', '.join(M.MIXER_KINDS)}")
    if args.partition is not None and args.partition not in M.STRATEGIES:
        raise C.ConfigError(f"unknown partition {args.partition!r}; choose from {', '.join(M.STRATEGIES)}")
    if args.p < 0:
        raise C.ConfigError("p must be >= 0")
    return C.build_pipeline(inst, args.encoding, args.mixer, args.partition, args.repeats, args.phase_mode,
                            args.family, args.reach)


def _stream_seeds(seed: int, n: int) -> list[int]:
    """Child seeds derived from the root seed with numpy's SeedSequence spawning."""
    return [int(s.generate_state(1, dtype=np.uint64)[0]) for s in np.random.SeedSequence(seed).spawn(n)]


def _fmt(args, default: str) -> str:
    f = args.format or default
    if f not in ("json", "csv"):
        raise C.ConfigError(f"unknown format {f!r}")
    return f


def _cfg_out(cfg):
    if isinstance(cfg, tuple):
        return [_cfg_out(c) for c in cfg]
    return cfg


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_solve(args) -> int:
    if args.seed is None:
        raise C.ConfigError("--seed is required for solve")
    if args.optimizer not in OPTIMIZERS:
        raise C.ConfigError(f"unknown optimizer {args.optimizer!r}")
    if args.shots < 1:
        raise C.ConfigError("--shots must be >= 1")
    t0 = time.perf_counter()
    inst = _load(args)
    pipe = _pipeline(args, inst)
    circ = pipe.circuit(args.p)
    if args.dump_circuit:
        write_text(dump(circ), args.dump_circuit)
    opt_seed, shot_seed = _stream_seeds(args.seed, 2)
    table = EN.ObjectiveTable.build(pipe.inst, pipe.enc)
    res = EN.optimize(circ, pipe.inst, pipe.enc, args.optimizer, opt_seed, grid_points=args.grid_points,
                      budget=args.budget, refine=args.refine, table=table)
    run = EN.run(circ, pipe.inst, pipe.enc, res.schedule, args.shots, shot_seed, table=table)
    opt = P.brute_force_optimum(pipe.inst)[0]
    try:
        ratio = EN.approximation_ratio(run.expectation, pipe.inst, opt)
    except EN.EngineError:
        ratio = None
    cfg = _config(args)
    top = sorted(((c, n) for c, n in run.samples.items() if c is not None), key=lambda cn: (-cn[1], repr(cn[0])))[:10]
    out = {
        "tool": "qaoa_kit",
        "command": "solve",
        "fingerprint": _fingerprint(cfg, inst),
        "seed": args.seed,
        "stream_seeds": {"optimizer": opt_seed, "sampling": shot_seed},
        "config": cfg,
        "instance": {"problem": inst.kind, "sense": inst.sense, "fingerprint": inst.fingerprint()},
        "pipeline": {**pipe.options, "problem": pipe.inst.kind, "n_qubits": circ.n_qubits,
                     "n_ancilla": circ.n_ancilla, "fingerprint": pipe.fingerprint()},
        "schedule": res.schedule.to_dict(),
        "evaluations": res.evaluations,
        "expectation": run.expectation,
        "optimum": opt,
        "approximation_ratio": ratio,
        "infeasible_mass": run.infeasible_mass,
        "best_sampled": {"configuration": _cfg_out(run.best_sampled), "value": run.best_sampled_value},
        "shots": args.shots,
        "invalid_shots": run.samples.get(None, 0),
        "top_samples": [{"configuration": _cfg_out(c), "count": n} for c, n in top],
    }
    if pipe.reduction is not None and run.best_sampled is not None:
        src = pipe.reduction.pull_back(run.best_sampled)
        out["reduction"] = {"source_problem": pipe.reduction.source.kind, "note": pipe.reduction.note,
                            "source_configuration": _cfg_out(src),
                            "source_value": pipe.reduction.source.objective(src)}
    if args.timing:
        out["timing_seconds"] = time.perf_counter() - t0
    if _fmt(args, "json") == "csv":
        rows = [[k, json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v] for k, v in sorted(out.items())]
        write_text(dumps_csv(["field", "value"], rows), args.out)
    else:
        write_text(dumps_json(out), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = tuple(c.strip() for c in args.checks.split(",") if c.strip())
    bad = [c for c in checks if c not in CHECKS]
    if bad:
        raise C.ConfigError(f"unknown checks {bad}; choose from {', '.join(CHECKS)}")
    seed = 0 if args.seed is None else args.seed
    targets = []
    if args.catalog:
        for kind, enc, mix in C.catalog_entries():
            inst = C.example_instance(kind, enc, mix)
            targets.append(C.build_pipeline(inst, enc, mix, None, args.repeats, args.phase_mode, args.family,
                                            max(args.reach, 2) if mix == "rnv" else args.reach))
    elif args.instance:
        targets.append(_pipeline(args, _load(args)))
    elif checks:
        raise InputError("verify needs --instance or --catalog")
    reports = []
    for pipe in targets:
        if args.inject_uncontrolled:
            partials = M.build_partial_mixers(pipe.inst, pipe.enc, "x") if not hasattr(pipe.enc, "parts") else \
                [M.PartialMixer(("x", q), (q,), 0, 1) for q in range(pipe.n_qubits)]
            pipe.mixer = M.make_mixer_spec(partials, "x", strategy="singleton")
            pipe.options = {**pipe.options, "mixer": "x(injected)"}
        if checks:
            for rep in V.verify_pipeline(pipe, seed, checks, connectivity_r=args.r_max):
                d = rep.to_dict()
                d["problem"] = pipe.inst.kind
                d["encoding"] = pipe.options["encoding"]
                d["mixer"] = pipe.options["mixer"]
                reports.append(d)
    cfg = _config(args)
    inst0 = targets[0].inst if len(targets) == 1 else None
    failed = sum(1 for r in reports if r["status"] == "fail")
    out = {"tool": "qaoa_kit", "command": "verify", "fingerprint": _fingerprint(cfg, inst0), "seed": seed,
           "config": cfg, "n_reports": len(reports), "n_failed": failed,
           "n_inconclusive": sum(1 for r in reports if r["status"] == "inconclusive"), "reports": reports}
    if _fmt(args, "json") == "csv":
        rows = [[r["problem"], r["encoding"], r["mixer"], r["check"], r["status"], json.dumps(r["measured"], sort_keys=True)]
                for r in reports]
        write_text(dumps_csv(["problem", "encoding", "mixer", "check", "status", "measured"], rows,
                             [f"fingerprint={out['fingerprint']}", f"seed={seed}"]), args.out)
    else:
        write_text(dumps_json(out), args.out)
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_resources(args) -> int:
    inst = _load(args)
    pipe = _pipeline(args, inst)
    circ = pipe.circuit(max(args.p, 1))
    rep = resource_report(circ)
    audit = V.audit_resources(pipe, pipe.fingerprint())
    cfg = _config(args)
    fp = _fingerprint(cfg, inst)
    seed = args.seed
    if _fmt(args, "json") == "csv":
        rows = []
        for name, st in rep.blocks.items():
            for key, n in sorted(st.counts.items()):
                rows.append([name, key, n, "", "", ""])
            rows.append([name, "depth", st.depth, "", "", ""])
            rows.append([name, "partial_depth", st.partial_depth, "", "", ""])
        for row in audit.details["rows"]:
            rows.append(["audit", row["quantity"], row["measured"], row["relation"], row["expected"], row["match"]])
        write_text(dumps_csv(["component", "quantity", "measured", "relation", "expected", "match"], rows,
                             [f"fingerprint={fp}", f"seed={seed}"]), args.out)
    else:
        out = {"tool": "qaoa_kit", "command": "resources", "fingerprint": fp, "seed": seed, "config": cfg,
               "report": rep.to_dict(), "audit": audit.to_dict()}
        write_text(dumps_json(out), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.seed is None:
        raise C.ConfigError("--seed is required for sweep")
    inst = _load(args)
    pipe = _pipeline(args, inst)
    circ = pipe.circuit(args.p)
    try:
        vecs = EN.grid_vectors(args.p, args.grid_points, (0.0, args.gamma_max), (0.0, args.beta_max))
    except EN.EngineError as exc:
        raise C.ConfigError(str(exc)) from None
    ev = EN.Evaluator(circ, pipe.inst, pipe.enc)
    vals = [ev.sign * s for s in ev.scores(vecs)]
    opt = P.brute_force_optimum(pipe.inst)[0]
    rows = []
    for v, f in zip(vecs, vals):
        try:
            ratio = EN.approximation_ratio(f, pipe.inst, opt)
        except EN.EngineError:
            ratio = None
        rows.append(list(v) + [f, ratio])
    header = [f"gamma_{k}" for k in range(1, args.p + 1)] + [f"beta_{k}" for k in range(1, args.p + 1)]
    header += ["expectation", "ratio"]
    cfg = _config(args)
    fp = _fingerprint(cfg, inst)
    if _fmt(args, "csv") == "json":
        write_text(dumps_json({"tool": "qaoa_kit", "command": "sweep", "fingerprint": fp, "seed": args.seed,
                               "config": cfg, "columns": header, "rows": rows}), args.out)
    else:
        write_text(dumps_csv(header, rows, [f"fingerprint={fp}", f"seed={args.seed}"]), args.out)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "verify": cmd_verify, "resources": cmd_resources, "sweep": cmd_sweep}


def main(argv=None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (C.ConfigError, M.MixerError, EN.EngineError, V.VerifyError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
