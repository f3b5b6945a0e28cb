import json
import subprocess
import sys

import pytest

from bpgd_erasure.cli import main


def run(*args):
    return main(list(args))


def test_describe_code(capsys):
    assert run("describe-code", "--code", "steane") == 0
    info = json.loads(capsys.readouterr().out)
    assert info["n"] == 7 and info["k"] == 1


def test_validate_ok_and_invalid(tmp_path, capsys):
    assert run("validate", "--code", "hgp1600") == 0
    assert "[[1600,64]]" in capsys.readouterr().out
    bad = tmp_path / "bad.css"
    bad.write_text("css 2 1 1\n0\n0\n")
    assert run("validate", "--code", str(bad)) == 1
    assert "odd overlap" in capsys.readouterr().err


def test_missing_code_is_io_error(capsys):
    assert run("describe-code", "--code", "/no/such/file.css") == 2
    assert run("validate", "--code", "nonsense") == 2


def test_malformed_file_is_io_error(tmp_path):
    bad = tmp_path / "bad.css"
    bad.write_text("hello\n")
    assert run("describe-code", "--code", str(bad)) == 2


def test_sweep_csv_stdout(capsys):
    assert run("sweep", "--code", "steane", "--rates", "0:0.2:0.1", "--trials", "50",
               "--decoder", "peeling", "--quiet") == 0
    out = capsys.readouterr().out
    rows = [ln for ln in out.splitlines() if not ln.startswith("#")]
    assert rows[0].startswith("rate,trials,exact")
    assert [r.split(",")[0] for r in rows[1:]] == ["0.0", "0.1", "0.2"]


def test_sweep_json_file_and_workers(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    common = ["sweep", "--code", "steane", "--rates", "0.3", "--trials", "400", "--seed", "5",
              "--decoder", "bpgd-damped", "--gamma", "0.9", "--quiet"]
    assert run(*common, "--out", str(a), "--workers", "1") == 0
    assert run(*common, "--out", str(b), "--workers", "2") == 0
    assert a.read_bytes() == b.read_bytes()
    j = tmp_path / "r.json"
    assert run(*common, "--format", "json", "--out", str(j)) == 0
    doc = json.loads(j.read_text())
    assert doc["points"][0]["config"]["bp"]["gamma"] == 0.9


def test_sweep_validation_errors(tmp_path, capsys):
    assert run("sweep", "--code", "steane", "--rates", "0.3", "--gamma", "1.5", "--quiet") == 1
    assert run("sweep", "--code", "steane", "--rates", "1.3", "--quiet") == 1
    assert run("sweep", "--code", "steane", "--rates", "0.3", "--quiet",
               "--out", str(tmp_path / "missing" / "x.csv")) == 2


def test_sweep_config_file(tmp_path, capsys):
    conf = tmp_path / "bp.conf"
    conf.write_text("T = 8\nllr_max = 15\n")
    assert run("sweep", "--code", "steane", "--rates", "0.2", "--trials", "20", "--quiet",
               "--config", str(conf), "--format", "json") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["points"][0]["config"]["bp"]["iterations"] == 8
    assert doc["points"][0]["config"]["bp"]["llr_max"] == 15.0


def test_dump_and_replay(tmp_path, capsys):
    path = tmp_path / "d.tsv"
    assert run("dump", "--code", "hgp1600", "--rate", "0.45", "--trials", "3", "--out",
               str(path)) == 0
    capsys.readouterr()
    assert run("replay", "--code", "hgp1600", "--instances", str(path), "--index", "0",
               "--decoder", "bpgd", "--bp-iters", "4") == 0
    out = capsys.readouterr().out
    assert "round 1:" in out and "outcome" in out
    for dec in ("peeling", "ml", "bp"):
        assert run("replay", "--code", "hgp1600", "--instances", str(path), "--decoder", dec) == 0
    assert run("replay", "--code", "hgp1600", "--instances", str(path), "--index", "9") == 1
    assert run("replay", "--code", "hgp1600", "--instances", str(tmp_path / "none")) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bpgd_erasure", "describe-code", "--code",
                           "steane"], capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0 and '"k": 1' in proc.stdout


def test_env_default_workers(monkeypatch, tmp_path):
    monkeypatch.setenv("BPGD_WORKERS", "2")
    out = tmp_path / "x.csv"
    assert run("sweep", "--code", "steane", "--rates", "0.3", "--trials", "50", "--quiet",
               "--out", str(out)) == 0
    assert out.exists()


def test_bad_arguments_exit_code():
    with pytest.raises(SystemExit) as exc:
        run("sweep", "--code", "steane")
    assert exc.value.code == 2
