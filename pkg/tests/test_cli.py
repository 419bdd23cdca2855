import json

import pytest

from vdcsets.cli import run


def run_json(argv, tmp_path, name="out.json"):
    out = tmp_path / name
    code = run(argv + ["--out", str(out)])
    return code, json.loads(out.read_text()), out


def test_witness_multiples_uses_fejer(tmp_path):
    code, doc, _ = run_json(["witness", "--set", "multiples:3", "--epsilon", "0.1"], tmp_path)
    assert code == 0
    assert doc["result"]["K"] == 11
    assert doc["result"]["witness"]["certified_min"] >= -0.1
    assert all(t["h"][0] % 3 == 0 for t in doc["result"]["witness"]["terms"])


def test_refute_progression(tmp_path):
    code, doc, _ = run_json(["refute", "--progression", "2,1"], tmp_path)
    assert code == 5
    assert doc["result"]["verdict"] == "not_vdC"
    assert "recheck" in doc["result"]["certificate"]


def test_kmf_obstruction(tmp_path):
    code, doc, _ = run_json(["kmf", "--poly", "z^2+1", "--qmax", "10"], tmp_path)
    assert code == 5
    assert doc["result"]["obstruction_q"] == 3


def test_kmf_all_roots(tmp_path):
    code, doc, _ = run_json(["kmf", "--poly", "z^2", "--qmax", "50"], tmp_path)
    assert code == 0 and doc["result"]["verdict"] == "all_roots_found"


def test_verify_exit_codes(tmp_path):
    _, _, wpath = run_json(["witness", "--set", "multiples:3", "--epsilon", "0.1"], tmp_path, "w.json")
    code, doc, _ = run_json(["verify", "--witness", str(wpath), "--set", "multiples:3",
                             "--epsilon", "0.1"], tmp_path)
    assert code == 0
    code, _, _ = run_json(["verify", "--witness", str(wpath), "--set", "progression:3,1",
                           "--epsilon", "0.1"], tmp_path)
    assert code == 3
    code, _, _ = run_json(["verify", "--witness", str(wpath), "--epsilon", "0.01"], tmp_path)
    assert code == 4


def test_every_output_embeds_config_and_version(tmp_path):
    _, doc, _ = run_json(["gen", "--set", "poly:n^2", "--count", "3", "--seed", "7"], tmp_path)
    assert doc["config"]["seed"] == 7
    assert doc["config"]["subcommand"] == "gen"
    assert doc["version"]
    assert doc["result"]["elements"] == [[1], [4], [9]]


def test_identical_configs_give_identical_bytes(tmp_path):
    argv = ["dq-test", "--g", "n^2", "--basis", "0", "--q", "1,2", "--threads", "1"]
    run(argv + ["--out", str(tmp_path / "a.json")])
    run(argv + ["--out", str(tmp_path / "a2.json")])
    a = json.loads((tmp_path / "a.json").read_text())
    b = json.loads((tmp_path / "a2.json").read_text())
    a["config"]["output"] = b["config"]["output"] = None
    assert a == b
    run(["recur", "--out", str(tmp_path / "r.json")])
    first = (tmp_path / "r.json").read_bytes()
    run(["recur", "--out", str(tmp_path / "r.json")])
    assert (tmp_path / "r.json").read_bytes() == first


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        run(["kmf", "--poly", "z^2", "--bogus"])
    assert info.value.code == 2
    assert "usage" in capsys.readouterr().err
    assert run(["kmf", "--poly", "z^2+0.5"]) == 2


def test_precision_errors_exit_7(tmp_path):
    code = run(["weyl", "--family", "powerlog:7/2,0", "--N", "100000", "--precision", "64",
                "--out", str(tmp_path / "x.json")])
    assert code == 7


def test_env_precision(monkeypatch, tmp_path):
    monkeypatch.setenv("VDC_PRECISION_BITS", "192")
    _, doc, _ = run_json(["gen", "--family", "kronecker:phi", "--count", "2"], tmp_path)
    assert doc["config"]["precision_bits"] == 192


def test_ud_inconsistent_exit_6(tmp_path):
    code, doc, _ = run_json(["weyl", "--family", "poly:n/3", "--N", "3000"], tmp_path)
    assert code == 6
    assert doc["result"]["report"]["verdict"] == "inconsistent"


def test_other_subcommands(tmp_path):
    code, doc, _ = run_json(["disc", "--family", "kronecker:phi", "--N", "1000"], tmp_path)
    assert code == 0 and doc["result"]["report"]["dstar"] < 0.01
    code, doc, _ = run_json(["refute", "--shifted-prime", "1,-1"], tmp_path)
    assert code == 0 and doc["result"]["verdict"] == "vdC"
    code, doc, _ = run_json(["refute", "--set", "progression:4,2"], tmp_path)
    assert code == 5
    code, doc, _ = run_json(["refute", "--set", "poly:n^2", "--qmax", "12"], tmp_path)
    assert code == 6
    code, doc, _ = run_json(["normal", "--N", "10000", "--digits-out",
                             str(tmp_path / "d.txt")], tmp_path)
    assert code == 0 and (tmp_path / "d.txt").read_text().startswith("123456789101112")
    code, doc, _ = run_json(["witness", "--set", "poly:2*n", "--epsilon", "0.12",
                             "--terms", "10"], tmp_path)
    assert code == 0 and doc["result"]["result"]["status"] == "feasible"
    code, doc, _ = run_json(["recur", "--set", "poly:n^2", "--max-n", "10000",
                             "--csv", str(tmp_path / "hits.csv")], tmp_path)
    assert code == 0
    assert (tmp_path / "hits.csv").read_text().startswith("n,t,overlap\n16,")
    code, doc, _ = run_json(["gen", "--set", "primes-1^5/2", "--count", "3"], tmp_path)
    assert doc["result"]["elements"] == [[1], [5], [32]]
    code, doc, _ = run_json(["weyl", "--family", "kronecker:phi,sqrt(2)", "--h", "1",
                             "--box", "50,50"], tmp_path)
    assert code == 0 and doc["result"]["report"]["modulus"] < 0.05
