import json
import subprocess
import sys

import pytest

from dihedral_selmer.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, EXIT_RESOURCE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_scan(capsys):
    code, out, _ = run(capsys, "scan", "--p", "3", "--d", "-1", "--n", "3")
    assert code == EXIT_OK and out.split() == ["11", "23", "47"]
    code, out, _ = run(capsys, "scan", "--set", "s1", "--p", "3", "--d", "-1", "--n", "2", "--format", "json")
    assert json.loads(out)["primes"] == [13, 37]


def test_relation(capsys):
    code, out, _ = run(capsys, "relation", "--p", "7", "--format", "json")
    data = json.loads(out)
    assert code == EXIT_OK and data["is_relation"] and data["kernel_rank"] == 1


def test_regconst(capsys):
    code, out, _ = run(capsys, "regconst", "--p", "3", "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["lattices"]["Z"] == "1/3"


def test_curve(capsys):
    code, out, _ = run(capsys, "curve", "--primes", "11", "23", "--format", "json")
    data = json.loads(out)
    assert data["lambda"] == "4049"
    assert {"q": 11, "type": "split_mult", "c_exponent": 2} in data["bad_primes"]
    code, out, _ = run(capsys, "curve", "--lambda", "3")
    assert "c4 = 112" in out
    assert run(capsys, "curve", "--lambda", "4")[0] == EXIT_INPUT
    assert run(capsys, "curve")[0] == EXIT_INPUT


def test_build_verify_ledger(capsys, tmp_path):
    path = tmp_path / "cert.json"
    code, _, _ = run(capsys, "build", "--p", "11", "--d", "-1", "--n", "2", "--out", str(path))
    assert code == EXIT_OK
    code, out, _ = run(capsys, "verify", str(path))
    assert code == EXIT_OK and out.strip().endswith("verdict: pass")
    code, out, _ = run(capsys, "ledger", str(path))
    assert code == EXIT_OK and "11^2" in out

    cert = json.loads(path.read_text())
    cert["curve"]["lambda"] = str(int(cert["curve"]["lambda"]) + 2)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(cert))
    code, out, _ = run(capsys, "verify", str(bad), "--format", "json")
    assert code == EXIT_FAIL and json.loads(out)["passed"] is False


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "build", "--p", "13", "--d", "13", "--n", "1")[0] == EXIT_INPUT
    assert run(capsys, "build", "--p", "11", "--d", "-1", "--n", "5", "--bound", "300")[0] == EXIT_RESOURCE
    assert run(capsys, "verify", str(tmp_path / "missing.json"))[0] == EXIT_INPUT
    with pytest.raises(SystemExit):
        main(["build", "--p", "x"])


def test_config(capsys, tmp_path):
    cfg = tmp_path / "cfg.toml"
    cfg.write_text('format = "json"\nbound = 300\n')
    code, out, _ = run(capsys, "--config", str(cfg), "scan", "--p", "3", "--d", "-1", "--n", "2")
    assert code == EXIT_OK and json.loads(out)["primes"] == [11, 23]
    code, _, err = run(capsys, "--config", str(cfg), "scan", "--p", "11", "--d", "-1", "--n", "8")
    assert code == EXIT_RESOURCE and "error" in err
    cfg.write_text("format = [")
    assert run(capsys, "--config", str(cfg), "relation", "--p", "3")[0] == EXIT_INPUT


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "dihedral_selmer", "relation", "--p", "5"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "relation: True" in res.stdout
