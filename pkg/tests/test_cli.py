import json
import subprocess
import sys
from pathlib import Path

import pytest

from gaudin_duality import cli
from gaudin_duality.psdo import PrecisionExhausted

ROOT = Path(__file__).resolve().parents[1]
D1M1 = str(ROOT / "scenarios" / "d1m1.json")
D2M2 = str(ROOT / "scenarios" / "d2m2.json")


def run(args, tmp_path, name="report.json"):
    out = tmp_path / name
    code = cli.main(list(args) + ["--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None), out


def test_pass_exit_code(tmp_path, capsys):
    code, rep, _ = run(["verify-duality", "--config", D1M1], tmp_path)
    assert code == cli.EXIT_PASS and rep["pass"]
    assert rep["reports"][0]["check"] == "duality"
    assert "PASS duality d1m1" in capsys.readouterr().out


def test_flip_fails_with_witness(tmp_path, capsys):
    code, rep, _ = run(["verify-duality", "--config", D2M2, "--flip", "xx"], tmp_path)
    assert code == cli.EXIT_FAIL and not rep["pass"]
    assert rep["reports"][0]["quantum"]["witness"]["z"] == 1
    assert "witness" in capsys.readouterr().out


def test_classical_flip(tmp_path):
    code, rep, _ = run(["verify-classical", "--config", D1M1, "--flip", "xx"], tmp_path)
    assert code == cli.EXIT_FAIL


@pytest.mark.parametrize("args", [
    ["verify-duality", "--config", "/nonexistent.json"],
    ["verify-duality", "--window", "1,2,3"],
    ["verify-berezinian", "--trials", "0"],
])
def test_config_errors(tmp_path, capsys, args):
    code, rep, _ = run(args, tmp_path)
    assert code == cli.EXIT_CONFIG and rep is None
    assert "config error" in capsys.readouterr().err


def test_bad_scenario_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"d": 2, "m": 2, "xi": [1], "gamma": [1, 1], "w": [0], "z": [1, 2]}))
    code, _, _ = run(["verify-duality", "--config", str(bad)], tmp_path)
    assert code == cli.EXIT_CONFIG
    assert "must sum to d = 2" in capsys.readouterr().err
    bad.write_text(json.dumps({"d": 1, "m": 1, "xi": [1], "gamma": [1], "w": [0], "z": [1], "suites": ["x"]}))
    assert run(["all", "--config", str(bad)], tmp_path)[0] == cli.EXIT_CONFIG


def test_precision_exhausted_exit_code(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise PrecisionExhausted("could not reach window")
    monkeypatch.setattr(cli, "verify_quantum_duality", boom)
    code, rep, _ = run(["verify-duality", "--config", D1M1], tmp_path)
    assert code == cli.EXIT_PRECISION
    assert rep["reports"][0]["error"] == "precision_exhausted"


def test_reports_are_byte_identical(tmp_path):
    args = ["verify-berezinian", "--seed", "4", "--trials", "6"]
    _, _, a = run(args, tmp_path, "a.json")
    _, _, b = run(args, tmp_path, "b.json")
    assert a.read_bytes() == b.read_bytes()
    _, _, c = run(["verify-berezinian", "--seed", "5", "--trials", "6"], tmp_path, "c.json")
    assert a.read_bytes() != c.read_bytes()


def test_parallel_matches_serial(tmp_path):
    base = ["verify-homs", "--config", D1M1, "--config", D2M2, "--cross", "howe"]
    c1, _, a = run(base, tmp_path, "a.json")
    c2, _, b = run(base + ["--jobs", "2"], tmp_path, "b.json")
    assert c1 == c2 == cli.EXIT_PASS
    assert a.read_bytes() == b.read_bytes()


def test_cross_policy(tmp_path):
    code, rep, _ = run(["verify-homs", "--config", D2M2], tmp_path)
    assert code == cli.EXIT_FAIL
    assert rep["reports"][0]["results"]["cross_all_pairs"]["pass"] is False


def test_timing_only_on_request(tmp_path):
    _, rep, _ = run(["verify-duality", "--config", D1M1], tmp_path)
    assert "seconds" not in rep["reports"][0]
    _, rep, _ = run(["verify-duality", "--config", D1M1, "--timing"], tmp_path)
    assert rep["reports"][0]["seconds"] >= 0


def test_console_entry_point(tmp_path):
    out = tmp_path / "r.json"
    proc = subprocess.run([sys.executable, "-m", "gaudin_duality.cli", "verify-classical", "--config", D1M1,
                           "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["scenarios"][0]["name"] == "d1m1"


def test_stdout_report(capsys):
    assert cli.main(["verify-classical", "--config", D1M1, "--out", "-"]) == 0
    text = capsys.readouterr().out
    assert '"command": "verify-classical"' in text
