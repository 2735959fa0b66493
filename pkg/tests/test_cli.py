import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from cohbound.cli import main
from cohbound.states import as_density, random_unitary
from cohbound.statistics import measurement_statistics

GOLDEN = Path(__file__).parent / "golden"


def run(*args, cwd=None):
    return subprocess.run([sys.executable, "-m", "cohbound", *map(str, args)],
                          capture_output=True, text=True, cwd=cwd)


@pytest.mark.parametrize("state,golden", [
    ("plus.json", "bound_plus_x.csv"),
    ("ket0.json", "bound_ket0.csv"),
    ("stats.json", "bound_stats.csv"),
])
def test_bound_golden(state, golden):
    res = run("bound", GOLDEN / state)
    assert res.returncode == 0, res.stderr
    assert res.stdout == (GOLDEN / golden).read_bytes().decode()


def test_bound_writes_file_and_manifest(tmp_path):
    res = run("bound", GOLDEN / "plus.json", "--basis", "mub:0", "--out", tmp_path)
    assert res.returncode == 0
    written = (tmp_path / "bound.csv").read_bytes()
    assert written == (GOLDEN / "bound_plus_x.csv").read_bytes()
    assert b"\r\n" not in written
    manifest = json.loads((tmp_path / "bound.csv.manifest.json").read_text())
    assert manifest["command"] == "bound"
    assert manifest["version"] == "0.1.0"
    assert manifest["seed"] == 0
    assert manifest["outputs"] == [str(tmp_path / "bound.csv")]


def test_bound_json_and_kind_filter():
    res = run("bound", GOLDEN / "plus.json", "--kinds", "re,rob", "--format", "json")
    rows = json.loads(res.stdout)
    assert [r["kind"] for r in rows] == ["RelEntropy", "Robustness"]
    assert rows[0]["lower"] == pytest.approx(1.0)


def test_state_and_statistics_paths_agree(tmp_path):
    rng = np.random.default_rng(19)
    g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = as_density(g @ g.conj().T / np.trace(g @ g.conj().T).real)
    basis = random_unitary(3, rng)
    state_file = tmp_path / "rho.json"
    basis_file = tmp_path / "basis.json"
    stats_file = tmp_path / "stats.json"
    for path, m in ((state_file, rho), (basis_file, basis)):
        path.write_text(json.dumps({"dim": 3, "re": m.real.ravel().tolist(), "im": m.imag.ravel().tolist()}))
    s = measurement_statistics(rho, basis)
    stats_file.write_text(json.dumps({"p": s.p.tolist(), "q": s.q.tolist(), "qprime": s.qprime.tolist()}))
    from_state = run("bound", state_file, "--basis", f"file:{basis_file}").stdout.splitlines()
    from_stats = run("bound", stats_file).stdout.splitlines()
    assert len(from_state) == len(from_stats) == 9
    for a, b in zip(from_state[1:], from_stats[1:]):
        assert a.rsplit(",", 1)[0] == b.rsplit(",", 1)[0]
        assert b.endswith(",NA")


@pytest.mark.parametrize("basis", ["mub:0.7", "bloch:1.1,0.4", "fourier"])
def test_basis_specs_accepted(basis):
    assert run("bound", GOLDEN / "plus.json", "--basis", basis).returncode == 0


@pytest.mark.parametrize("args", [
    ("bound", GOLDEN / "missing.json"),
    ("bound", GOLDEN / "plus.json", "--basis", "hadamard"),
    ("bound", GOLDEN / "plus.json", "--basis", "bloch:1.0"),
    ("bound", GOLDEN / "plus.json", "--kinds", "re,xyz"),
    ("verify", "everything"),
    ("sample", "--dim", "1"),
])
def test_usage_errors_exit_2(args):
    res = run(*args)
    assert res.returncode == 2
    assert res.stderr


def test_qubit_only_basis_on_qutrit(tmp_path):
    f = tmp_path / "q3.json"
    f.write_text(json.dumps({"dim": 3, "re": [1, 0, 0], "im": [0, 0, 0]}))
    res = run("bound", f, "--basis", "mub:0")
    assert res.returncode == 2 and "qubits" in res.stderr


def test_invalid_state_and_distribution(tmp_path):
    bad_state = tmp_path / "bad.json"
    bad_state.write_text(json.dumps({"dim": 2, "re": [0.6, 0, 0, 0.6], "im": [0, 0, 0, 0]}))
    assert run("bound", bad_state).returncode == 2
    bad_stats = tmp_path / "neg.json"
    bad_stats.write_text(json.dumps({"p": [1.2, -0.2], "q": [0.5, 0.5], "qprime": [0.5, 0.5]}))
    res = run("bound", bad_stats)
    assert res.returncode == 2 and "InvalidDistribution" in res.stderr
    mismatch = tmp_path / "mm.json"
    mismatch.write_text(json.dumps({"p": [0.5, 0.5], "q": [0.2, 0.3, 0.5], "qprime": [0.5, 0.5]}))
    assert "DimensionMismatch" in run("bound", mismatch).stderr


def test_counts_are_renormalized_with_warning(tmp_path):
    f = tmp_path / "counts.json"
    f.write_text(json.dumps({"p": [50, 50], "q": [80, 20], "qprime": [0.5, 0.5]}))
    res = run("bound", f)
    assert res.returncode == 0
    assert "renormalizing" in res.stderr
    assert res.stdout == (GOLDEN / "bound_stats.csv").read_text()


def test_benchmark_bundled_table(tmp_path):
    res = run("benchmark", "table2", "--out", tmp_path)
    assert res.returncode == 0, res.stderr
    lines = (tmp_path / "benchmark.csv").read_text().splitlines()
    assert lines[0] == "quantifier,strategy,grid,seed,q_value,refinement_delta,wall_time_s"
    # compare everything but the wall-time column against the frozen run
    got = [ln.split(",")[:5] for ln in lines]
    want = [ln.split(",") for ln in (GOLDEN / "table2_prefix.csv").read_text().splitlines()]
    assert got == want
    manifest = json.loads((tmp_path / "benchmark.csv.manifest.json").read_text())
    assert manifest["config"]["config"] == "bundled:table2.cfg"
    assert len(manifest["config"]["runs"]) == 8


def test_benchmark_spectrum_json(tmp_path):
    res = run("benchmark", "spectrum", "--format", "json", "--out", tmp_path, "--seed", "3")
    assert res.returncode == 0
    reports = json.loads((tmp_path / "benchmark.json").read_text())
    assert [r["config"]["strategy"] for r in reports] == ["SpectrumRandomB", "SpectrumMubB"]
    assert all(r["config"]["seed"] == 3 for r in reports)
    assert reports[0]["q_value"] == pytest.approx(0.17, abs=0.01)


def test_benchmark_malformed_and_coarse(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("[run]\nquantifier = L7\nstrategy = mub\n")
    res = run("benchmark", bad, "--out", tmp_path)
    assert res.returncode == 2 and "L7" in res.stderr
    junk = tmp_path / "junk.cfg"
    junk.write_text("this is not ini\n")
    assert run("benchmark", junk, "--out", tmp_path).returncode == 2
    assert run("benchmark", "no-such-config", "--out", tmp_path).returncode == 2
    coarse = tmp_path / "coarse.cfg"
    coarse.write_text("[re]\nquantifier = re\nstrategy = mub\ngrid = 8,8,8\nmax_delta = 1e-9\n")
    res = run("benchmark", coarse, "--out", tmp_path)
    assert res.returncode == 1
    assert "refinement" in res.stderr
    assert (tmp_path / "benchmark.csv").read_text().count("\n") == 2


def test_verify_small_and_mutation():
    res = run("verify", "sandwich", "--samples", "60")
    assert res.returncode == 0
    summary = json.loads(res.stdout)
    assert summary["passed"] and summary["results"][0]["violations"] == 0
    res = run("verify", "sandwich", "--samples", "60", "--mutate", "skew-no-half")
    assert res.returncode == 1
    assert not json.loads(res.stdout)["passed"]
    assert "--mutate" not in run("verify", "--help").stdout


def test_verify_all_suites_in_process(tmp_path, capsys):
    assert main(["verify", "all", "--samples", "40", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "verify.json").read_text())
    assert [r["suite"] for r in summary["results"]] == ["sandwich", "saturation", "udr", "majorization"]
    assert (tmp_path / "verify.json.manifest.json").exists()


def test_sample_is_byte_identical_on_rerun(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("sample", "--dim", "2", "--count", "1", "--seed", "42", "--out", a).returncode == 0
    assert run("sample", "--dim", "2", "--count", "1", "--seed", "42", "--out", b).returncode == 0
    assert (a / "state_0000.json").read_bytes() == (b / "state_0000.json").read_bytes()
    c = tmp_path / "c"
    run("sample", "--dim", "2", "--count", "1", "--seed", "43", "--out", c)
    assert (a / "state_0000.json").read_bytes() != (c / "state_0000.json").read_bytes()


def test_sample_mixed_states_validate(tmp_path):
    assert run("sample", "--dim", "3", "--count", "3", "--kind", "mixed", "--out", tmp_path).returncode == 0
    for i in range(3):
        obj = json.loads((tmp_path / f"state_{i:04d}.json").read_text())
        m = (np.array(obj["re"]) + 1j * np.array(obj["im"])).reshape(3, 3)
        as_density(m)
        assert run("bound", tmp_path / f"state_{i:04d}.json").returncode == 0


def test_sample_zero_count(tmp_path):
    res = run("sample", "--dim", "2", "--count", "0", "--out", tmp_path / "z")
    assert res.returncode == 0
    assert not (tmp_path / "z").exists() or not any((tmp_path / "z").iterdir())


def test_version_flag():
    res = run("--version")
    assert res.returncode == 0 and "0.1.0" in res.stdout
