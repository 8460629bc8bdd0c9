import csv
import io
import json

import pytest

from bjortho.cli import CONFIG_SCHEMA, REPORT_SCHEMA, run, run_suite

L2 = {"p": 2, "dim": 2}


def write(tmp_path, name, cfg):
    path = tmp_path / name
    path.write_text(json.dumps(dict(cfg, schema=CONFIG_SCHEMA)))
    return str(path)


def invoke(capsys, argv):
    code = run(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def verdict(report, name):
    return next(v for v in report["verdicts"] if v["name"] == name)


def test_vector_check(tmp_path, capsys):
    cfg = write(tmp_path, "v.json", {"space": L2, "x": [1, 0], "y": [0, 1]})
    code, out, _ = invoke(capsys, ["vector-check", cfg, "--mode", "bj"])
    rep = json.loads(out)
    assert code == 0 and rep["schema"] == REPORT_SCHEMA
    assert verdict(rep, "bj")["holds"] is True
    assert rep["seed"] == 0 and rep["tolerance"] == 1e-9
    assert rep["inputs"]["config"]["x"] == [1, 0]
    code, out, _ = invoke(capsys, ["vector-check", cfg, "--mode", "eps=0.5", "--format", "text"])
    assert code == 0 and "holds=True" in out


@pytest.mark.parametrize("cfg,args", [
    ({"space": L2, "x": [1, 0]}, []),
    ({"space": L2, "x": [1, 0, 3], "y": [0, 1]}, []),
    ({"space": {"p": 0.3, "dim": 2}, "x": [1, 0], "y": [0, 1]}, []),
    ({"space": L2, "x": [1, 0], "y": [0, 1]}, ["--mode", "eps=1.5"]),
])
def test_input_errors(tmp_path, capsys, cfg, args):
    path = write(tmp_path, "bad.json", cfg)
    code, _, err = invoke(capsys, ["vector-check", path] + args)
    assert code == 3 and "input error" in err


def test_malformed_json_location(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"schema": "bjo-config/1",\n "space": }')
    code, _, err = invoke(capsys, ["vector-check", str(path)])
    assert code == 3 and "broken.json:2:" in err
    path.write_text(json.dumps({"schema": "other/9"}))
    code, _, err = invoke(capsys, ["vector-check", str(path)])
    assert code == 3 and "schema" in err
    assert invoke(capsys, ["no-such-command"])[0] == 3


def test_op_norm_and_heuristic_exit(tmp_path, capsys):
    cfg = write(tmp_path, "o.json", {"operator": {"kind": "dense", "matrix": [[2, 0], [0, 1]]},
                                     "domain": L2, "codomain": L2})
    code, out, _ = invoke(capsys, ["op-norm", cfg])
    assert code == 0 and json.loads(out)["certificates"][0]["value"] == pytest.approx(2.0)
    cfg = write(tmp_path, "h.json", {"operator": {"kind": "dense", "matrix": [[2, 1], [0, 1]]},
                                     "domain": {"p": 1.5, "dim": 2},
                                     "codomain": {"p": 3, "dim": 2}})
    code, out, _ = invoke(capsys, ["op-norm", cfg])
    assert code == 2 and "HEURISTIC" in json.loads(out)["flags"]


def test_op_check_family_defect(tmp_path, capsys):
    cfg = write(tmp_path, "f.json", {"operator": {"kind": "family", "id": "example25_T", "N": 10},
                                     "operator2": {"kind": "family", "id": "example25_A",
                                                   "N": 10}})
    code, out, _ = invoke(capsys, ["op-check", cfg, "--method", "both", "--N", "1000"])
    rep = json.loads(out)
    assert code == 0
    within = verdict(rep, "direct_within_defect")
    assert within["holds"] is True and within["delta"] <= 2e-6
    assert verdict(rep, "direct")["holds"] is False
    assert verdict(rep, "characterization")["holds"] is False
    cert = next(c for c in rep["certificates"] if c["name"] == "truncation_defect")
    assert cert["N"] == 1000 and cert["delta"] == pytest.approx(9.999969999840985e-07, rel=1e-9)


def test_attainment_and_functional(tmp_path, capsys):
    cfg = write(tmp_path, "a.json", {"operator": {"kind": "dense", "matrix": [[2, 0], [0, 1]]},
                                     "domain": L2, "codomain": L2})
    code, out, _ = invoke(capsys, ["attainment", cfg])
    assert code == 0 and json.loads(out)["certificates"][0]["exact"] is True
    cfg = write(tmp_path, "fn.json", {"space": {"p": 1, "dim": 2}, "f": [1, 1], "g": [1, -1]})
    code, out, _ = invoke(capsys, ["functional-check", cfg])
    rep = json.loads(out)
    assert code == 0 and verdict(rep, "functional_bj")["holds"] is True
    assert verdict(rep, "dual_pencil")["holds"] is True


def test_witness_csv(tmp_path, capsys):
    cfg = write(tmp_path, "w.json", {"operator": {"kind": "family", "id": "example23_T", "N": 2},
                                     "operator2": {"kind": "family", "id": "example23_A",
                                                   "N": 2}})
    code, out, _ = invoke(capsys, ["witness", cfg, "--n-max", "20", "--format", "csv"])
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 20 and rows[0]["sequence"] == "condition_a"
    cfg = write(tmp_path, "h.json", {"operator": {"kind": "dense", "matrix": [[1, 0], [0, 1]]},
                                     "operator2": {"kind": "dense", "matrix": [[1, 0], [0, -1]]},
                                     "domain": L2, "codomain": L2})
    code, out, _ = invoke(capsys, ["witness", cfg, "--kind", "rotund", "--n-max", "10"])
    rep = json.loads(out)
    assert verdict(rep, "rotund_plus")["holds"] is True
    assert "ROTUNDITY-CALLER-ASSERTED" in rep["flags"] and len(rep["rows"]) == 20


def test_smoothness_commands(tmp_path, capsys):
    ident = write(tmp_path, "i.json", {"operator": {"kind": "dense", "matrix": [[1, 0], [0, 1]]},
                                       "domain": L2, "codomain": L2})
    code, out, _ = invoke(capsys, ["smoothness", ident, "--kind", "necessary"])
    rep = json.loads(out)
    assert verdict(rep, "necessary")["holds"] == "NON-SMOOTH-CERTIFIED"
    assert verdict(rep, "T_A1_plus_A2")["holds"] is False
    diag = write(tmp_path, "d.json", {"operator": {"kind": "dense", "matrix": [[2, 0], [0, 1]]},
                                      "domain": L2, "codomain": L2})
    code, out, _ = invoke(capsys, ["smoothness", diag, "--kind", "sufficient"])
    assert code == 0 and verdict(json.loads(out), "sufficient")["holds"] is True
    code, out, _ = invoke(capsys, ["smoothness", diag, "--kind", "additivity", "--trials", "20"])
    v = verdict(json.loads(out), "right_additivity")
    assert code == 0 and v["passes"] == 20


def test_family_sweep_csv(capsys):
    code, out, _ = invoke(capsys, ["family", "example23", "--N-list", "10,100,1000"])
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [int(r["N"]) for r in rows] == [10, 100, 1000]
    assert float(rows[0]["delta"]) == pytest.approx(31 / 143, abs=1e-15)
    assert invoke(capsys, ["family", "example23", "--N-list", "1,5"])[0] == 3


def test_suite_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["suite", "--cases", "500", "--seed", "42", "-o", str(a)]) == 0
    assert run(["suite", "--cases", "500", "--seed", "42", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    assert all(v["holds"] for v in rep["verdicts"]) and not rep["flags"]


def test_run_suite_counts():
    res = run_suite(30, seed=3)
    assert all(c["fail"] == 0 for c in res.values())
    assert res["holder"]["pass"] == 30


def test_seed_from_environment(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("BJO_SEED", "17")
    cfg = write(tmp_path, "v.json", {"space": L2, "x": [1, 0], "y": [0, 1]})
    code, out, _ = invoke(capsys, ["vector-check", cfg])
    assert json.loads(out)["seed"] == 17
    monkeypatch.setenv("BJO_SEED", "abc")
    assert invoke(capsys, ["vector-check", cfg])[0] == 3


def test_oracle_revalidates_report(tmp_path, capsys):
    cfg = write(tmp_path, "v.json", {"space": {"p": 1, "dim": 2}, "x": [1, 0], "y": [1, 1]})
    report = tmp_path / "r.json"
    assert run(["vector-check", cfg, "-o", str(report)]) == 0
    code, out, _ = invoke(capsys, ["oracle", str(report), "--points", "200001"])
    rep = json.loads(out)
    assert code == 0 and verdict(rep, "grid_bj")["holds"] is True
    opcfg = write(tmp_path, "op.json", {
        "operator": {"kind": "dense", "matrix": [[1, 0], [0, 1]]},
        "operator2": {"kind": "dense", "matrix": [[1, 0], [0, -1]]},
        "domain": L2, "codomain": L2})
    code, out, _ = invoke(capsys, ["oracle", opcfg, "--range", "10", "--resolution", "1e-2"])
    rep = json.loads(out)
    assert verdict(rep, "grid_bj")["holds"] is True
    assert rep["certificates"][0]["lower_bound"] == pytest.approx(1.0, abs=1e-4)
