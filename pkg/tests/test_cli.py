import json
import subprocess
import sys

import pytest

from cuboidramsey import cli
from cuboidramsey.serialize import config_from_json, config_to_json


def run(args, stdin=None, env=None):
    proc = subprocess.run([sys.executable, "-m", "cuboidramsey", *args], input=stdin,
                          capture_output=True, text=True, env=env)
    return proc.returncode, proc.stdout, proc.stderr


def call(capsys, *args):
    code = cli.main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_params_lemma3(capsys):
    code, out, _ = call(capsys, "params", "lemma3", "--h", "2", "--nprime", "1,1")
    assert code == 0 and json.loads(out) == {"n": [7, 3]}


def test_params_lemma4(capsys):
    code, out, _ = call(capsys, "params", "lemma4", "--mprime", "2,2,2")
    assert json.loads(out) == {"m": [2, 8, 896]}


def test_decompose(capsys):
    code, out, _ = call(capsys, "decompose", "--b2", "1,4")
    assert code == 0 and json.loads(out) == {"t": [1, 4], "a2": [1, 1, 1, 1, 1]}
    code, out, _ = call(capsys, "decompose", "--b2", "4,9", "--embedding")
    data = json.loads(out)
    assert data["a2"] == [4, 3, 3, 3] and data["profile_ok"] is True
    assert len(data["embedding"]) == 4


def test_build_then_verify_pipe():
    code, built, _ = run(["build", "tree-simplex", "--arity", "3", "--height", "2",
                          "--a2", "1", "--b2", "4"])
    assert code == 0
    code, out, _ = run(["verify", "distances"], stdin=built)
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_round_trip_is_lossless(capsys):
    call(capsys, "build", "tree-simplex", "--parents", "0,0,1,1,2", "--a2", "2/3", "--b2", "5")
    code, out, _ = call(capsys, "build", "tree-simplex", "--parents", "0,0,1,1,2",
                        "--a2", "2/3", "--b2", "5")
    data = json.loads(out)
    c = config_from_json(data)
    assert config_to_json(c) == data
    again = config_from_json(json.loads(json.dumps(config_to_json(c))))
    assert again.points == c.points and again.phi == c.phi


def test_float_export(capsys):
    _, out, _ = call(capsys, "build", "simplex", "--k", "3", "--d2", "2", "--float")
    data = json.loads(out)
    assert data["points_float"][0][0] == pytest.approx(1.0)


def test_budget_refusal(capsys):
    code, out, err = call(capsys, "build", "C", "--a2", "1", "--b2", "1,4")
    assert code == 3
    data = json.loads(out)
    assert data["refused"] is True
    assert data["estimate"] == "39597324395575465454481"
    assert json.loads(err)["error"] == "budget"


def test_budget_env_default(monkeypatch, capsys):
    monkeypatch.setenv("CUBOIDRAMSEY_BUDGET", "5")
    code, _, _ = call(capsys, "build", "tree-simplex", "--arity", "2", "--height", "2",
                      "--a2", "1", "--b2", "1")
    assert code == 3
    monkeypatch.setenv("CUBOIDRAMSEY_BUDGET", "lots")
    code, _, err = call(capsys, "build", "tree-simplex", "--arity", "2", "--height", "1",
                        "--a2", "1", "--b2", "1")
    assert code == 2 and "CUBOIDRAMSEY_BUDGET" in err


@pytest.mark.parametrize("argv", [[], ["build"], ["params", "lemma3", "--h", "x", "--nprime", "1"],
                                  ["build", "tree-simplex", "--a2", "1", "--b2", "4"],
                                  ["build", "tree-simplex", "--arity", "2", "--height", "1",
                                   "--a2", "5", "--b2", "4"]])
def test_usage_errors(argv, capsys):
    code, _, _ = call(capsys, *argv)
    assert code == 2


def test_malformed_input(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = call(capsys, "verify", "distances", str(bad))
    assert code == 2 and "error" in json.loads(err)
    code, _, _ = call(capsys, "verify", "distances", str(tmp_path / "missing.json"))
    assert code == 2


def test_extract_lemma2_and_certificate_verify(tmp_path, capsys):
    _, cfg, _ = call(capsys, "build", "C", "--a2", "1", "--b2", "4")
    (tmp_path / "c.json").write_text(cfg)
    (tmp_path / "col.json").write_text(json.dumps({str(i): i for i in range(13)}))
    code, cert, _ = call(capsys, "extract", "lemma2", "--config", str(tmp_path / "c.json"),
                         "--colouring", str(tmp_path / "col.json"))
    assert code == 0 and json.loads(cert)["kind"] == "rainbow-cuboid"
    (tmp_path / "cert.json").write_text(cert)
    code, out, _ = call(capsys, "verify", "certificate", "--certificate", str(tmp_path / "cert.json"),
                        "--colouring", str(tmp_path / "col.json"), "--config", str(tmp_path / "c.json"))
    assert code == 0 and json.loads(out)["ok"]
    (tmp_path / "col2.json").write_text(json.dumps({str(i): 0 for i in range(13)}))
    code, out, _ = call(capsys, "verify", "certificate", "--certificate", str(tmp_path / "cert.json"),
                        "--colouring", str(tmp_path / "col2.json"), "--config", str(tmp_path / "c.json"))
    assert code == 1 and not json.loads(out)["ok"]


def test_extract_rainbow_box(tmp_path, capsys):
    col = {json.dumps([x, y], separators=(",", ":")): x + y for x in range(2) for y in range(8)}
    (tmp_path / "g.json").write_text(json.dumps(col))
    code, out, _ = call(capsys, "extract", "rainbow-box", "--sizes", "2,8", "--mprime", "2,2",
                        "--colouring", str(tmp_path / "g.json"))
    assert code == 0 and json.loads(out)["claim"]["sets"] == [[0, 1], [0, 2]]


def test_fuzz_is_deterministic():
    args = ["fuzz", "lemma4", "--trials", "5", "--seed", "3"]
    a, b = run(args), run(args + ["--jobs", "2"])
    assert a[0] == b[0] == 0
    assert a[1] == b[1]
    lines = [json.loads(x) for x in a[1].splitlines()]
    assert [r["seed"] for r in lines if "seed" in r] == [3, 4, 5, 6, 7]


def test_oracle_arrow(tmp_path, capsys):
    _, cfg, _ = call(capsys, "build", "simplex", "--k", "4", "--d2", "1")
    (tmp_path / "s.json").write_text(cfg)
    code, out, _ = call(capsys, "oracle", "arrow", "--config", str(tmp_path / "s.json"),
                        "--r", "3", "--target", "pair:1", "--cross-check")
    assert code == 0 and json.loads(out)["holds"] is True
    code, out, _ = call(capsys, "oracle", "arrow", "--config", str(tmp_path / "s.json"),
                        "--r", "4", "--target", "pair:1")
    assert code == 1 and json.loads(out)["holds"] is False
