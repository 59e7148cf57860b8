import json

import numpy as np
import pytest

from gwords import cli
from gwords.matfile import matrix_to_dict
from gwords.suites import RESULTS, SUITES, SuiteResult, run_suite

SMALL = {
    "class1": {"trials": 50}, "thm-n2": {"trials": 50, "exact_trials": 10}, "thm-n3": {"trials": 30},
    "thm-2eig": {"trials": 30}, "thfour": {"trials": 5}, "not2good": {"max_class": 5, "sweep_class": 3},
    "identities": {"k_max": 4, "m_max": 50}, "perron": {"trials": 10}, "hijo-eq2": {},
}


def test_every_result_has_a_suite():
    assert set(RESULTS.values()) == set(SUITES)
    assert set(SMALL) == set(SUITES)


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_passes_small(name):
    r = run_suite(name, **SMALL[name])
    assert isinstance(r, SuiteResult)
    assert r.passed, r.failures
    d = r.to_dict()
    assert d["suite"] == name and d["passed"] is True


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope")


def test_suite_failures_are_capped():
    r = SuiteResult("x")
    for i in range(20):
        r.fail(i=i)
    assert not r.passed and len(r.failures) <= 5


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def test_reduce_and_classify(capsys):
    code, rep, _ = run(capsys, "reduce", "A B A^-1 B^-1")
    assert code == 0 and rep["results"]["m"] == 2 and rep["command"] == "reduce"
    assert len(rep["inputs_digest"]) == 64 and rep["tool_version"]
    code, rep, _ = run(capsys, "classify", "A B A^2 B^2")
    assert code == 0 and rep["results"]["verdict"] in ("ProvablyGood", "Unknown", "ProvablyBad")


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "reduce", "A B^")[0] == 2
    assert run(capsys, "eval", "A B", str(tmp_path / "missing.json"), "eq2-B")[0] == 2
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "witness", "--recipe", "epsilon")[0] == 2


def test_eval_hijo(capsys):
    code, rep, _ = run(capsys, "eval", "A B A^2 B^2", "eq2-A", "eq2-B", "--exact")
    assert code == 0
    r = rep["results"]
    assert r["verdict"] == "NotAllPositive" and r["certificate"]["kind"] == "NegativeTrace"
    assert r["certificate"]["value"] == "-3164" and r["certificate_checked"] is True
    code, _, _ = run(capsys, "eval", "A B A^2 B^2", "eq2-A", "eq2-B", "--exact", "--assert-positive")
    assert code == 1


def test_eval_float_files(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    a.write_text(json.dumps(matrix_to_dict(np.diag([2.0, 3.0]))))
    b.write_text(json.dumps(matrix_to_dict(np.array([[2.0, 1.0], [1.0, 2.0]]))))
    code, rep, _ = run(capsys, "eval", "A B^-1", str(a), str(b), "--assert-positive")
    assert code == 0 and rep["results"]["verdict"] == "AllPositive"


def test_witness_recipes(capsys):
    code, rep, _ = run(capsys, "witness", "--recipe", "hijo-eq2")
    assert code == 0 and rep["results"]["witness"]["certified"]
    code, rep, _ = run(capsys, "witness", "A B A^-1 B^-1")
    assert code == 0 and rep["results"]["witness"]["provenance"].startswith("epsilon(")
    code, rep, _ = run(capsys, "witness", "--recipe", "thfour")
    assert code == 0
    code, rep, _ = run(capsys, "witness", "A^2 B", "--trials", "200")
    assert code == 1 and rep["results"]["witness"] is None


def test_search_report_and_timing(capsys):
    code, rep, _ = run(capsys, "search", "A B A^2 B^2", "--trials", "100")
    assert code == 0 and "timing" in rep and rep["seed"] == 0
    code, rep, _ = run(capsys, "search", "A B A^2 B^2", "--trials", "100", "--no-timing")
    assert "timing" not in rep


def test_no_timing_reports_are_byte_identical(tmp_path):
    outs = []
    for threads in ("1", "4"):
        p = tmp_path / f"r{threads}.json"
        assert cli.main(["search", "A B A^2 B^2", "--n", "3", "--trials", "300", "--threads", threads,
                         "--no-timing", "--out", str(p)]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_verify_command(capsys):
    code, rep, _ = run(capsys, "verify", "hijo-eq2")
    assert code == 0 and rep["results"][0]["passed"]


def test_verify_failure_exit(capsys, monkeypatch):
    from gwords import suites

    def bad(**_):
        r = SuiteResult("hijo-eq2")
        r.fail(reason="forced")
        return r
    monkeypatch.setitem(suites.SUITES, "hijo-eq2", suites.Suite("hijo-eq2", bad, "forced"))
    assert run(capsys, "verify", "hijo-eq2")[0] == 1


def test_halmos_command(capsys, tmp_path):
    p, q = tmp_path / "p.json", tmp_path / "q.json"
    p.write_text(json.dumps({"n": 2, "mode": "rational", "entries": ["1", "0", "0", "0"]}))
    q.write_text(json.dumps({"n": 2, "mode": "rational", "entries": ["1/2", "1/2", "1/2", "1/2"]}))
    code, rep, _ = run(capsys, "halmos", str(p), str(q))
    assert code == 0
    assert rep["results"]["principal_angles"][0] == pytest.approx(np.pi / 4)
    q.write_text(json.dumps({"n": 2, "mode": "rational", "entries": ["2", "0", "0", "0"]}))
    assert run(capsys, "halmos", str(p), str(q))[0] == 2
