from __future__ import annotations

import json
import math
import subprocess
import sys

import pytest

from qaoa_kit import catalog as C
from qaoa_kit import mixers as M
from qaoa_kit import problems as P
from qaoa_kit import verify as V
from qaoa_kit.cli import main
from qaoa_kit.graphs import path_graph
from qaoa_kit.io import InputError, dumps_csv, envelope, load_instance, parse_dimacs

# ---- verify


def test_beta_samples_fixed_prefix_and_seeded_tail():
    a, b = V.beta_samples(1), V.beta_samples(1)
    assert a == b and len(a) == 20 and a[:5] == V.FIXED_BETAS
    assert all(0 < x < math.pi / 2 for x in a[5:])


def test_connectivity_fails_at_zero_beta():
    pipe = C.build_pipeline(P.MaxIndependentSet(path_graph(3)))
    rep = V.check_connectivity(pipe.mixer, 3, V.pipeline_feasible(pipe), beta_star=0.0, r_max=4)
    assert rep.status == "fail"


def test_connectivity_reports_reachability():
    pipe = C.build_pipeline(P.MaxIndependentSet(path_graph(3)))
    rep = V.check_connectivity(pipe.mixer, 3, V.pipeline_feasible(pipe))
    assert rep.status == "pass"
    reach = rep.details["reachability"]
    assert all(all(row) for row in reach)


def test_phase_check_catches_wrong_affine():
    pipe = C.build_pipeline(P.MaxIndependentSet(path_graph(3)))
    pipe.sep.affine = type(pipe.sep.affine)(pipe.sep.affine.scale * 2, pipe.sep.affine.offset)
    assert V.check_phase_separator(pipe.sep, pipe.inst, pipe.enc).status == "fail"


def test_trotter_exact_for_commuting_parts():
    pipe = C.build_pipeline(P.MaxCut(path_graph(3)))
    rep = V.check_trotter_order(pipe.mixer, 3)
    assert rep.status == "pass" and rep.measured["exact_match"]


def test_resource_audit_detects_mismatch():
    pipe = C.build_pipeline(P.MaxIndependentSet(path_graph(3)))
    pipe.mixer = M.make_mixer_spec(pipe.mixer.partials[:2], "cx", strategy="singleton")
    assert V.audit_resources(pipe).status == "fail"


def test_caps_are_enforced():
    pipe = C.build_pipeline(P.MaxIndependentSet(path_graph(3)))
    with pytest.raises(V.VerifyError):
        V.check_connectivity(pipe.mixer, 3, V.pipeline_feasible(pipe), max_qubits=2)
    with pytest.raises(V.VerifyError):
        V.check_connectivity(pipe.mixer, 3, V.pipeline_feasible(pipe), r_max=0)


# ---- io


def test_dimacs_parse_is_one_based():
    g = parse_dimacs("c x\np edge 3 2\ne 1 2\ne 2 3 2.5\n")
    assert g.edges == ((0, 1), (1, 2)) and g.weights == (1.0, 2.5)


@pytest.mark.parametrize("text,msg", [
    ("e 1 2\n", "before"),
    ("p edge 2 1\ne 1 x\n", "line 2"),
    ("p edge 2 2\ne 1 2\n", "declares 2"),
    ("p edge 2 1\ne 1 3\n", "outside"),
    ("p edge 2 1\nq 1\n", "unknown record"),
])
def test_dimacs_errors(text, msg):
    with pytest.raises(InputError, match=msg):
        parse_dimacs(text)


def test_json_envelope_roundtrip(tmp_path):
    inst = P.MaxColorableSubgraph(path_graph(3), 3)
    path = tmp_path / "x.json"
    path.write_text(json.dumps(envelope(inst)))
    assert load_instance(path).fingerprint() == inst.fingerprint()


def test_json_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"problem": "MaxCut",\n "data": {"n": 2,}}')
    with pytest.raises(InputError, match="line 2"):
        load_instance(bad)
    sense = tmp_path / "sense.json"
    sense.write_text('{"problem": "MaxCut", "sense": "minimize", "data": {"n": 2, "edges": [[0, 1]]}}')
    with pytest.raises(InputError, match="sense"):
        load_instance(sense)
    missing = tmp_path / "missing.json"
    missing.write_text('{"problem": "MaxColorableSubgraph", "data": {"n": 2, "edges": [[0, 1]]}}')
    with pytest.raises(InputError):
        load_instance(missing)


def test_csv_comments():
    text = dumps_csv(["a", "b"], [[1, 0.5], [None, "x"]], ["seed=3"])
    assert text.splitlines() == ["# seed=3", "a,b", "1,0.5", ",x"]


# ---- cli


@pytest.fixture
def files(tmp_path):
    mis = tmp_path / "mis.json"
    mis.write_text(json.dumps(envelope(P.MaxIndependentSet(path_graph(4)))))
    tri = tmp_path / "tri.dimacs"
    tri.write_text("p edge 3 3\ne 1 2\ne 2 3\ne 1 3\n")
    return {"mis": str(mis), "tri": str(tri), "dir": tmp_path}


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_solve_output_fields(files, capsys):
    assert main(["solve", "--instance", files["mis"], "--seed", "4", "--grid-points", "6", "--shots", "50"]) == 0
    out = _json(capsys)
    for key in ("fingerprint", "seed", "schedule", "expectation", "approximation_ratio", "infeasible_mass"):
        assert key in out
    assert out["seed"] == 4 and "timing_seconds" not in out
    assert out["infeasible_mass"] < 1e-10


def test_solve_reduction_only_problem(files, capsys, tmp_path):
    path = tmp_path / "vc.json"
    path.write_text(json.dumps({"problem": "MinVertexCover", "sense": "minimize",
                                "data": {"n": 3, "edges": [[0, 1], [1, 2]]}}))
    assert main(["solve", "--instance", str(path), "--seed", "1", "--grid-points", "4", "--shots", "20"]) == 0
    out = _json(capsys)
    assert out["pipeline"]["problem"] == "MaxIndependentSet"
    assert out["reduction"]["source_problem"] == "MinVertexCover"


def test_dimacs_with_problem_flag(files, capsys):
    code = main(["resources", "--instance", files["tri"], "--problem", "MaxColorableSubgraph", "--kappa", "3"])
    assert code == 0
    assert _json(capsys)["audit"]["status"] == "pass"


@pytest.mark.parametrize("argv,code", [
    (["solve", "--instance", "MISSING.json", "--seed", "1"], 2),
    (["solve", "--instance", "{mis}"], 3),
    (["solve", "--instance", "{mis}", "--seed", "1", "--mixer", "ring"], 3),
    (["solve", "--instance", "{mis}", "--seed", "1", "--optimizer", "newton"], 3),
    (["solve", "--instance", "{mis}", "--seed", "1", "--partition", "zigzag"], 3),
    (["sweep", "--instance", "{mis}"], 3),
    (["verify", "--instance", "{mis}", "--checks", "bogus"], 3),
    (["solve", "--nonsense"], 2),
    (["verify", "--instance", "{mis}", "--checks", ""], 0),
    (["verify", "--instance", "{mis}", "--inject-uncontrolled", "--checks", "preservation"], 1),
])
def test_exit_codes(files, argv, code, capsys):
    argv = [a.format(mis=files["mis"]) for a in argv]
    assert main(argv) == code


def test_verify_checks_pass(files, capsys):
    assert main(["verify", "--instance", files["mis"], "--checks", "preservation,connectivity,phase,trotter"]) == 0
    out = _json(capsys)
    assert out["n_failed"] == 0 and {r["check"] for r in out["reports"]} >= {"connectivity", "trotter_order"}


def test_sweep_csv(files, capsys):
    assert main(["sweep", "--instance", files["tri"], "--seed", "2", "--grid-points", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("# fingerprint=") and lines[1] == "# seed=2"
    assert lines[2] == "gamma_1,beta_1,expectation,ratio" and len(lines) == 3 + 9


def test_timing_is_opt_in(files, capsys):
    main(["solve", "--instance", files["tri"], "--seed", "2", "--grid-points", "3", "--timing"])
    assert "timing_seconds" in _json(capsys)


def test_dump_circuit(files, capsys):
    path = files["dir"] / "c.txt"
    main(["solve", "--instance", files["mis"], "--seed", "2", "--grid-points", "3", "--dump-circuit", str(path)])
    assert path.read_text().startswith("# qubits=")


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "qaoa_kit", "resources", "--instance", files["tri"]],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and '"fingerprint"' in proc.stdout


def test_verify_catalog(capsys):
    assert main(["verify", "--catalog", "--checks", "preservation,phase,resources"]) == 0
    out = _json(capsys)
    assert out["n_reports"] == 3 * len(C.catalog_entries()) and out["n_failed"] == 0
