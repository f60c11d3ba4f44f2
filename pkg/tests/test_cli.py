import json

import pytest

from mrk.cli import batch, main, render_report, render_summary, run, run_file
from mrk.cli.problem import ProblemError, load, loads

from conftest import GOLDEN, PROBLEMS

ALL = sorted(PROBLEMS.glob("*.problem"))
EX2 = (PROBLEMS / "example2.problem").read_text()


@pytest.mark.parametrize("path", ALL, ids=lambda p: p.stem)
def test_golden_reports(path):
    assert render_report(run_file(path), "json") == (GOLDEN / f"{path.stem}.json").read_bytes()


def test_reports_are_deterministic():
    path = PROBLEMS / "example3.problem"
    outs = {render_report(run_file(path), fmt) for fmt in ("json",) for _ in range(3)}
    assert len(outs) == 1
    assert render_report(run_file(path, seed=7), "json") != outs.pop()  # seed is echoed


@pytest.mark.parametrize("text,msg", [
    ("[problem]\nname = x\n", "hamiltonian"),
    ("[symbols]\ncoordinates = q1\nmomenta = p1\n[problem]\nhamiltonian = p1^2 +\n", "hamiltonian"),
    ("[bogus]\n[problem]\nhamiltonian = 1\n", "bogus"),
    ("[symbols]\ncoordinates = q1\nmomenta = p1\n[assumptions]\nm = prime\n[problem]\nhamiltonian = p1^2\n", "assumption"),
    ("[symbols]\ncoordinates = q1\nmomenta = p1\n[problem]\nhamiltonian = p1^2\n[requests]\nve1 = maybe\n", "yes/no"),
    ("not an ini file", "malformed"),
])
def test_problem_file_errors(text, msg):
    with pytest.raises(ProblemError, match=msg):
        loads(text)


def test_assumptions_parsed():
    prob = load(PROBLEMS / "proposition.problem")
    m = prob.table.parameters["m"]
    assert m.integer and m.minimum == 3
    assert [dict(i) for i in prob.instances] == [{"m": 3}, {"m": 4}, {"m": 5}]


def test_exit_codes(tmp_path, capsysbinary):
    assert main(["run", str(PROBLEMS / "example2.problem"), "--format", "json"]) == 0
    out = json.loads(capsysbinary.readouterr().out)
    assert out["stages"][-1]["outcome"] == "NonIntegrable"
    bad = tmp_path / "bad.problem"
    bad.write_text("[problem]\n")
    assert main(["run", str(bad)]) == 2
    assert main(["run", str(tmp_path / "missing.problem")]) == 2
    capsysbinary.readouterr()
    # a pipeline failure (non-invariant plane) is reported, not fatal
    wrong = tmp_path / "wrong.problem"
    wrong.write_text(EX2.replace("plane = q2, p2", "plane = q1, p1"))
    assert main(["run", str(wrong), "--format", "json"]) == 0
    rep = json.loads(capsysbinary.readouterr().out)
    assert rep["stages"][-1]["status"] == "error" and rep["stages"][-1]["kind"] == "pipeline"


def test_seed_reported_on_stderr(capsysbinary):
    main(["run", str(PROBLEMS / "example1.problem"), "--seed", "0x10"])
    assert b"seed: 0x10" in capsysbinary.readouterr().err


def test_output_file(tmp_path):
    out = tmp_path / "r.tex"
    assert main(["run", str(PROBLEMS / "example1.problem"), "--format", "latex", "-o", str(out)]) == 0
    assert r"\frac{12}{t^{2}}" in out.read_text()


def test_text_lists_parameter_independence():
    text = render_report(run_file(PROBLEMS / "proposition.problem"), "text").decode()
    assert "independent of parameters: a, b" in text


def test_batch_all_examples():
    rows, _ = batch(ALL, jobs=3)
    verdicts = {r.name: r.verdict for r in rows}
    assert verdicts == {
        "example1": "Inconclusive", "example2": "NonIntegrable", "example3": "NonIntegrable",
        "example4": "Inconclusive", "proposition": "Inconclusive", "quartic": "Inconclusive",
    }
    assert [r.path for r in rows] == [str(p) for p in ALL]
    assert render_summary(rows).endswith(b"total: 4 Inconclusive, 2 NonIntegrable\n")


def test_batch_empty_and_partial_failure(tmp_path, capsysbinary):
    assert main(["batch"]) == 0
    assert b"no problems" in capsysbinary.readouterr().out
    bad = tmp_path / "bad.problem"
    bad.write_text("[problem]\nhamiltonian = p1^\n")
    files = [str(PROBLEMS / "example1.problem"), str(bad), str(PROBLEMS / "example2.problem")]
    assert main(["batch", "--jobs", "2", "--format", "json", *files]) == 2
    rows = json.loads(capsysbinary.readouterr().out)
    assert [r["verdict"] for r in rows] == ["Inconclusive", None, "NonIntegrable"]
    assert rows[1]["error"]


def test_no_requests_runs_no_stages():
    rep = run(loads(EX2.split("[requests]")[0]))
    assert rep.stages == [] and rep.failed is None


def test_even_degree_polynomial_is_non_abelian():
    rep = run(loads(EX2.replace("q1^3*q2^2", "q1^2*q2^2")))
    galois = rep.stage("galois")
    groups = [c["group"] for c in galois["classifications"]]
    assert "UndeterminedNonAbelian" in groups
    assert rep.verdict == "NonIntegrable"


def test_check_integral(capsys):
    path = str(PROBLEMS / "example1.problem")
    assert main(["check-integral", path, "--candidate", "1/4*(p1 + p2)^2 - (q1 + q2)^3"]) == 0
    out = capsys.readouterr().out
    assert "{H, F} = 0" in out and "not a" not in out
    assert main(["check-integral", path, "--candidate", "q1"]) == 0
    assert "not a first integral" in capsys.readouterr().out
    assert main(["check-integral", path, "--candidate", "q1 +"]) == 2
