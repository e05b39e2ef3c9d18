import json
import subprocess
import sys

import pytest

from voatorus.cli import main
from voatorus.elliptic import eisenstein
from voatorus.fps import MultiSeries
from voatorus.suites import RunConfig, parse_config_text, run_suite


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eisenstein_json_roundtrip(capsys):
    code, out, _ = run(capsys, "eisenstein", "--k", "2", "--order", "2", "--json")
    s = MultiSeries.from_json(out)
    assert code == 0 and s == eisenstein(2, 2)
    assert [t["val"] for t in json.loads(out)["terms"]] == ["1/720*λ^4", "1/3*λ^4", "3*λ^4"]
    # bit-exact: re-serializing the parsed series reproduces the canonical dump
    assert s.dumps() == eisenstein(2, 2).dumps()
    assert json.dumps(json.loads(out), sort_keys=True, ensure_ascii=False) == s.dumps()


def test_wp_and_reduce(capsys):
    code, out, _ = run(capsys, "wp", "--m", "2", "--ny", "2", "--nq", "1", "--json")
    s = MultiSeries.from_json(out)
    assert code == 0 and s.coeff((-2, 0)) == 1
    code, out, _ = run(capsys, "reduce", "--target", "g:8", "--json")
    assert json.loads(out)["polynomial"] == [{"coefficient": "3/7", "monomial": {"G4": 2}}]
    code, out, _ = run(capsys, "reduce", "--target", "wp:4")
    assert code == 0 and "P2" in out
    code, _, err = run(capsys, "reduce", "--target", "foo:3")
    assert code == 2 and "error" in err


def test_voa_build(capsys, tmp_path):
    out_file = tmp_path / "v.json"
    code, out, _ = run(capsys, "voa", "build", "--kind", "virasoro:1/2", "--cutoff", "6",
                       "--out", str(out_file), "--json")
    d = json.loads(out)
    assert code == 0 and d["dims"] == [1, 0, 1, 1, 2, 2, 4]
    assert json.loads(out_file.read_text()) == d and d["sample_modes"]


def test_geomod_commands(capsys):
    code, out, _ = run(capsys, "geomod", "ajcoeffs", "--count", "3", "--json")
    assert json.loads(out)["B"] == ["-1/2", "1/12", "-1/48"]
    assert run(capsys, "geomod", "check", "--which", "lemma", "--voa", "heisenberg")[0] == 0
    assert run(capsys, "geomod", "check", "--which", "chgvar", "--voa", "heisenberg", "--vector", "a")[0] == 0
    assert run(capsys, "geomod", "check", "--which", "l1", "--voa", "virasoro:1/2")[0] == 0


def test_zhu_commands(capsys):
    code, out, _ = run(capsys, "zhu", "check", "--voa", "heisenberg", "--cutoff", "3", "--json")
    assert code == 0 and json.loads(out)["all_passed"]
    code, out, _ = run(capsys, "zhu", "table", "--voa", "virasoro:1/2", "--cutoff", "4", "--which", "star", "--json")
    assert code == 0 and json.loads(out)["which"] == "star"
    code, out, _ = run(capsys, "zhu", "iso", "--voa", "virasoro:1/2", "--cutoff", "4", "--json")
    assert code == 0 and json.loads(out)["status"] == "pass"
    code, out, _ = run(capsys, "zhu", "rho", "--voa", "heisenberg", "--module", "fock:1/2", "--json")
    d = json.loads(out)
    assert code == 0 and d["matrices"]["a"] == [["1/2*λ"]]


def test_trace_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "trace", "run", "--voa", "heisenberg", "--vectors", "vacuum", "--nq", "5", "--json")
    d = json.loads(out)
    assert code == 0 and d["q_offset"] == "-1/24"
    assert [d["coefficients"]["%d|0" % m] for m in range(6)] == ["1", "1", "2", "3", "5", "7"]
    spec = tmp_path / "chain.json"
    spec.write_text(json.dumps({"voa": "lattice:1", "cutoff": 8,
                                "maps": ["intertwiner:1,0", "intertwiner:1,1"],
                                "vectors": ["basis:0:0", "basis:0:1"]}))
    code, out, _ = run(capsys, "trace", "run", "--chain", str(spec), "--nq", "1", "--nx", "1", "--json")
    assert code == 0 and json.loads(out)["coefficients"]
    code, out, _ = run(capsys, "trace", "check", "--identity", "0", "--chain", str(spec),
                       "--nq", "1", "--nx", "1", "--json")
    d = json.loads(out)
    assert code == 0 and d["status"] == "pass" and d["first_mismatch"] is None and d["orders"]
    assert run(capsys, "trace", "check", "--identity", "ode", "--voa", "virasoro:1/2")[0] == 0
    code, _, err = run(capsys, "trace", "check", "--identity", "1", "--params", "k=3")
    assert code == 2 and "unknown" in err


def test_modular_commands(capsys):
    assert run(capsys, "modular", "check", "--object", "g2", "--tau", "0.1,1.3")[0] == 0
    assert run(capsys, "modular", "link", "--m", "1", "--tau", "1.4i", "--tol", "1e-7")[0] == 0
    code, out, _ = run(capsys, "modular", "sclosure", "--voa", "lattice:1", "--nq", "40", "--json")
    d = json.loads(out)
    assert code == 0 and d["status"] == "pass" and len(d["matrix"]) == 2 and d["residuals"] < 1e-6


def test_tolerance_zero_is_refused(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["modular", "check", "--tol", "0"])
    assert exc.value.code == 2
    code, _, err = run(capsys, "suite", "run", "--suite", "section4", "--tol", "0")
    assert code == 2 and "tolerance" in err


def test_config_parsing(tmp_path):
    assert parse_config_text("voa = heisenberg  # comment\n\nG = 5\n") == {"voa": "heisenberg", "G": "5"}
    with pytest.raises(ValueError):
        parse_config_text("just words")
    with pytest.raises(ValueError):
        parse_config_text("G = 1\nG = 2")
    with pytest.raises(ValueError):
        RunConfig.from_mapping({"bogus": 1})
    with pytest.raises(ValueError):
        RunConfig.from_mapping({"N_q": "0"})
    with pytest.raises(ValueError):
        RunConfig.from_mapping({"suite": "section9"})


def test_suite_section1_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    out = tmp_path / "report.json"
    cfg.write_text("voa = virasoro:1/2\nsuite = section1\noutput = %s\n" % out)
    code, text, _ = run(capsys, "suite", "run", "--config", str(cfg))
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["schema_version"] == 1 and rep["summary"]["all_passed"]
    assert all(set(c) >= {"anchor", "orders", "status", "first_mismatch"} for c in rep["checks"])


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("voa = heisenberg\ncolour = blue\n")
    code, _, err = run(capsys, "suite", "run", "--config", str(cfg))
    assert code == 2 and "colour" in err


def test_report_is_deterministic():
    cfg = RunConfig(voa="heisenberg", suite="section4,section7", N_q=3)
    a, t1 = run_suite(cfg)
    b, t2 = run_suite(cfg)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert "timings" not in a and set(t1) == {"section4", "section7"}


def test_tiny_cutoffs_warn(capsys):
    code, out, _ = run(capsys, "suite", "run", "--suite", "all", "--voa", "virasoro:1/2", "--G", "2",
                       "--zhu-cutoff", "2", "--json")
    rep = json.loads(out)
    assert rep["warnings"] and any("cutoff" in w for w in rep["warnings"])
    assert code == (0 if rep["summary"]["all_passed"] else 1)


def test_precision_env(monkeypatch, capsys):
    import mpmath
    old = mpmath.mp.dps
    monkeypatch.setenv("VOATORUS_PRECISION", "40")
    try:
        assert run(capsys, "eisenstein", "--k", "1", "--order", "1")[0] == 0
        assert mpmath.mp.dps == 40
    finally:
        mpmath.mp.dps = old
    monkeypatch.setenv("VOATORUS_PRECISION", "lots")
    assert run(capsys, "eisenstein", "--k", "1")[0] == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "voatorus", "eisenstein", "--k", "1", "--order", "1", "--json"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["vars"] == ["q"]
