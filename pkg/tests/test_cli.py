import json

import pytest

from powersum import orchestrator as orch
from powersum.cli import main
from powersum.sieve import SieveConfig


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_compute_text(capsys):
    code, out, _ = run(capsys, "compute", "24", "2")
    assert code == 0
    assert "S = 4900" in out and "70^2" in out


def test_compute_json(capsys):
    code, rep = run_json(capsys, "compute", "2", "3")
    assert code == 0 and rep["verdict"] == "Done"
    assert rep["outputs"]["T"]["value"] == str(3**3 + 4**3)
    assert rep["outputs"]["S"]["value"] == "9"
    assert rep["outputs"]["S"]["witnesses"] == [["3", 2]]


def test_compute_digit_guard(capsys):
    code, _, err = run(capsys, "compute", "2", "10000000", "--max-digits", "1000")
    assert code == 2 and "digits" in err


def test_bounds_baker_x(capsys):
    code, rep = run_json(capsys, "bounds", "2")
    assert code == 0
    assert [r["bound"] for r in rep["outputs"]["bounds"]] == [7500, 3200, 45000]
    assert all(r["certified"] for r in rep["outputs"]["bounds"])


def test_bounds_valuation_x(capsys):
    code, out, _ = run(capsys, "bounds", "9", "5")
    assert code == 0 and "UpperBound(3)" in out
    code, rep = run_json(capsys, "bounds", "33", "4")
    assert code == 1 and rep["verdict"] == "Undecided"


def test_sieve_composite_reduces(capsys):
    code, rep = run_json(capsys, "sieve", "2", "9")
    assert code == 0
    assert rep["inputs"]["reduced"] == [3]
    assert rep["verdict"] == "Proven"


def test_sieve_undecided_exit_code(capsys):
    code, rep = run_json(capsys, "sieve", "4", "4", "--max-primes", "5")
    assert code == 1 and rep["verdict"] == "Undecided"
    assert rep["verdicts"][0]["reason"]


@pytest.mark.parametrize("argv", [
    ["sieve", "1", "3"], ["sieve", "2", "2"], ["prove", "14"], ["bounds", "1"],
    ["search", "5..2"], ["compute", "0", "1"], ["nonsense"], ["sieve", "2", "3", "--max-primes", "-1"],
])
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_search(capsys):
    code, rep = run_json(capsys, "search", "1..3", "--k-max", "5", "--n-min", "2", "--n-max", "5")
    ws = {(w["x"], w["k"], w["n"]) for w in rep["outputs"]["witnesses"]}
    assert (1, 1, 2) not in ws  # T_1(1) = 2
    assert (1, 3, 3) in ws  # T_3(1) = 8 = 2^3, x = 1
    assert all(not w["in_scope"] for w in rep["outputs"]["witnesses"])
    assert code == 0 and rep["notes"]


def test_tables(capsys, tmp_path):
    code, rep = run_json(capsys, "tables", "--outdir", str(tmp_path))
    assert code == 0
    assert all(rep["outputs"]["matrix"].values())
    assert len(rep["outputs"]["files"]) == 7
    assert len(rep["outputs"]["offset_identity"]) == 18


def test_prove_valuation_x(capsys):
    code, rep = run_json(capsys, "prove", "5")
    assert code == 0 and rep["verdict"] == "Proven"
    assert rep["outputs"]["plan"]["n_list"] == [3, 4]


def test_prove_baker_x_truncated(capsys):
    code, rep = run_json(capsys, "prove", "2", "--n-ceiling", "11", "--small-y-k", "120")
    assert code == 0 and rep["verdict"] == "Truncated"
    assert any(n.startswith("TRUNCATED") for n in rep["notes"])
    comps = {v.get("component") for v in rep["verdicts"]}
    assert {"direct search", "bounds", "y <= 10^6", "sieve"} <= comps
    assert all(v["status"] == "Proven" for v in rep["verdicts"])


def test_prove_full_scale_infeasible(capsys):
    code, rep = run_json(capsys, "prove", "11", "--full-scale")
    assert code == 1 and rep["verdict"] == "Infeasible"
    assert any("--checkpoint" in n for n in rep["notes"])
    assert rep["verdicts"] == []


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"max_primes": 2, "json": True}))
    code, out, _ = run(capsys, "sieve", "5", "3", "--config", str(cfg))
    rep = json.loads(out)
    assert code == 1 and rep["inputs"]["config"]["max_primes"] == 2
    code, out, _ = run(capsys, "sieve", "5", "3", "--config", str(cfg), "--max-primes", "100")
    assert code == 0 and json.loads(out)["inputs"]["config"]["max_primes"] == 100


def test_config_file_errors(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "sieve", "5", "3", "--config", str(cfg))[0] == 2
    assert run(capsys, "sieve", "5", "3", "--config", str(tmp_path / "missing.json"))[0] == 2


def test_checkpoint_resume_through_cli(capsys, tmp_path):
    d = str(tmp_path)
    code, rep = run_json(capsys, "sieve", "5", "3", "--checkpoint", d, "--max-primes", "4")
    assert code == 1 and rep["checkpoints"] == [f"{d}/sieve-x5-n3.json"]
    code, rep = run_json(capsys, "sieve", "5", "3", "--checkpoint", d)
    assert code == 0 and rep["verdict"] == "Proven"


def test_reports_deterministic():
    a = orch.cmd_prove(4, config=SieveConfig()).to_json(with_timings=False)
    b = orch.cmd_prove(4, config=SieveConfig(), workers=2).to_json(with_timings=False)
    assert a == b
    assert "timings" not in json.loads(a)


def test_exit_codes():
    for verdict, code in [("Proven", 0), ("Truncated", 0), ("Done", 0), ("Undecided", 1), ("Infeasible", 1)]:
        assert orch.RunReport("x", {}, verdict=verdict).exit_code == code


def test_plans():
    p = orch.make_plan(8)
    assert p.n_bound == 4 and p.strategy == {3: "SieveOnly", 4: "SieveOnly"}
    q = orch.make_plan(11, n_ceiling=31)
    assert q.truncated and q.n_list[-1] == 31 and q.search_k == 83
    assert orch.theorem_ceiling(12)[0] == 2
