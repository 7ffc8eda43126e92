import json
import subprocess
import sys

import numpy as np
import pytest

from hypercut.cli import main
from hypercut.hmetis import write_hmetis
from hypercut.hypercore import Hypergraph, NodeWeights, generalized_degrees, pi_expansion
from hypercut.synthetic import planted_partition

from conftest import T1_EDGES

TIMING = {"wall_time", "seconds"}


@pytest.fixture
def t1_file(tmp_path):
    path = tmp_path / "t1.hmetis"
    write_hmetis(path, 4, T1_EDGES)
    return path


@pytest.fixture
def medium_file(tmp_path):
    edges, _ = planted_partition(40, 120, seed=2)
    path = tmp_path / "medium.hmetis"
    weights = [1.0 + (i % 3) for i in range(len(edges))]
    write_hmetis(path, 40, edges, weights)
    return path, edges, weights


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def strip_timing(obj):
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k not in TIMING}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def test_oracle(capsys, t1_file):
    code, rep, _ = run_cli(capsys, "oracle", "--input", t1_file, "--weights", "unit")
    assert code == 0
    # internal set {1, 2} printed 1-based
    assert rep["opt"] == 1.0 and rep["set"] == [2, 3]


def test_ce(capsys, t1_file):
    code, rep, _ = run_cli(capsys, "ce", "--input", t1_file)
    assert code == 0 and rep["phi"] == 1.0
    assert rep["input"]["n"] == 4 and rep["splitting"] == "aon"


def test_reduce(capsys, t1_file, tmp_path):
    out = tmp_path / "out.el"
    code, rep, _ = run_cli(capsys, "reduce", "--input", t1_file, "--dump-reduced", out)
    assert code == 0 and rep["nodes"] == 10 and rep["arcs"] == 19
    lines = out.read_text().splitlines()
    assert len(lines) == 19
    assert {int(x) for line in lines for x in line.split()[:2]} == set(range(10))


def test_solve_report(capsys, medium_file):
    path, edges, weights = medium_file
    code, rep, err = run_cli(
        capsys, "solve", "--input", path, "--splitting", "delta-linear:2",
        "--weights", "degree", "--iters", "auto", "--seed", "7", "--report-trace",
    )
    assert code == 0
    for key in ("input", "objective", "splitting", "best_set", "phi", "lower_bound", "rho", "wall_time", "seed", "trace"):
        assert key in rep
    assert rep["input"]["mu"] == sum(len(e) for e in edges)
    assert rep["iterations"] == len(rep["trace"]) == int(np.ceil(5 * np.log2(40)))
    assert "best set" in err
    # round trip: recompute phi on the reported set in input scale
    H = Hypergraph.build(40, edges, "delta-linear:2", weights)
    pi = generalized_degrees(H)
    S = [v - 1 for v in rep["best_set"]]
    assert rep["phi"] == pytest.approx(pi_expansion(H, pi, S), rel=1e-9)
    assert rep["lower_bound"] <= rep["phi"]
    assert rep["trace"][-1]["lower_bound"] == pytest.approx(rep["lower_bound"], rel=1e-12)


def test_solve_deterministic(capsys, medium_file):
    path = medium_file[0]
    args = ["solve", "--input", path, "--seed", "3", "--iters", "8", "--report-trace"]
    _, a, _ = run_cli(capsys, *args)
    _, b, _ = run_cli(capsys, *args)
    assert json.dumps(strip_timing(a), sort_keys=True) == json.dumps(strip_timing(b), sort_keys=True)


def test_trace_verify_roundtrip(capsys, t1_file, tmp_path):
    trace = tmp_path / "trace.jsonl"
    code, rep, _ = run_cli(
        capsys, "solve", "--input", t1_file, "--iters", "4", "--verify-embeddings", "5", "--trace", trace,
    )
    assert code == 0 and rep["max_congestion_ratio"] <= 1 + 1e-9
    rows = [json.loads(line) for line in trace.read_text().splitlines()]
    assert len(rows) == 4 and all("certificate" in r for r in rows)
    code, rep, _ = run_cli(capsys, "verify", "--input", t1_file, "--trace", trace, "--bisections", "15")
    assert code == 0 and rep["ok"] and len(rep["iterations"]) == 4

    # tamper with one path amount: the replay must flag it
    rows[0]["certificate"]["paths"][0][0] *= 50
    trace.write_text("".join(json.dumps(r) + "\n" for r in rows))
    code, rep, _ = run_cli(capsys, "verify", "--input", t1_file, "--trace", trace)
    assert code == 3 and not rep["ok"]


def test_verify_without_certificates(capsys, t1_file, tmp_path):
    trace = tmp_path / "trace.jsonl"
    run_cli(capsys, "solve", "--input", t1_file, "--iters", "2", "--trace", trace)
    code, _, err = run_cli(capsys, "verify", "--input", t1_file, "--trace", trace)
    assert code == 2 and "no certificates" in err


def test_dumps_and_figures(capsys, t1_file, tmp_path):
    figs = tmp_path / "figs"
    code, _, _ = run_cli(
        capsys, "solve", "--input", t1_file, "--iters", "3",
        "--dump-reduced", tmp_path / "g.el", "--dump-flow", tmp_path / "f.txt", "--figures", figs,
    )
    assert code == 0
    assert len((tmp_path / "g.el").read_text().splitlines()) == 19
    flow = [line.split() for line in (tmp_path / "f.txt").read_text().splitlines()]
    assert len(flow) == 19 + 4
    assert all(float(f) <= float(c) * (1 + 1e-9) for _, _, c, f in flow)
    assert {p.name for p in figs.iterdir()} == {"bounds.png", "ratio.png", "trace.csv"}


def test_custom_splitting(capsys, t1_file, tmp_path):
    good = tmp_path / "good.txt"
    good.write_text("1 1.5\n")
    code, rep, _ = run_cli(capsys, "solve", "--input", t1_file, "--splitting", f"custom:{good}", "--iters", "2")
    assert code == 0 and rep["splitting"] == "custom:1.0,1.5"
    bad = tmp_path / "bad.txt"
    bad.write_text("1 3\n")
    code, rep, err = run_cli(capsys, "solve", "--input", t1_file, "--splitting", f"custom:{bad}")
    assert code == 2 and rep is None and "SubmodularityViolation" in err


def test_validation_errors(capsys, t1_file, tmp_path):
    pi = tmp_path / "pi.txt"
    pi.write_text("1\n0\n1\n1\n")
    code, _, err = run_cli(capsys, "solve", "--input", t1_file, "--weights", f"file:{pi}")
    assert code == 2 and "positive node weight required" in err
    code, _, err = run_cli(capsys, "solve", "--input", tmp_path / "missing.hmetis")
    assert code == 2
    bad = tmp_path / "bad.hmetis"
    bad.write_text("2 3\n1 2\n")
    code, _, err = run_cli(capsys, "solve", "--input", bad)
    assert code == 2 and "InvalidHypergraph" in err
    code, _, err = run_cli(capsys, "solve", "--input", t1_file, "--splitting", "nonsense")
    assert code == 2
    code, _, err = run_cli(capsys, "oracle", "--input", t1_file, "--weights", "heavy")
    assert code == 2


def test_file_weights_are_used(capsys, t1_file, tmp_path):
    pi = tmp_path / "pi.txt"
    pi.write_text("2\n1\n1\n2\n")
    code, rep, _ = run_cli(capsys, "oracle", "--input", t1_file, "--weights", f"file:{pi}")
    H = Hypergraph.build(4, T1_EDGES)
    S = [v - 1 for v in rep["set"]]
    assert rep["opt"] == pytest.approx(pi_expansion(H, NodeWeights([2.0, 1, 1, 2]), S), rel=1e-12)


def test_module_entry_point(t1_file):
    proc = subprocess.run(
        [sys.executable, "-m", "hypercut", "oracle", "--input", str(t1_file)],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["opt"] == 1.0
    proc = subprocess.run([sys.executable, "-m", "hypercut"], capture_output=True, text=True, check=False)
    assert proc.returncode == 2
