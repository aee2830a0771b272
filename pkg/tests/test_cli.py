import json
import os
import subprocess
import sys

import pytest

from qstatebench.cli import main

TINY_CONFIG = """\
n_values: [4, 8]
n_pieces: 8
dql:
  hidden_layout: [8]
"""


@pytest.fixture
def cfg(tmp_path):
    p = tmp_path / "tiny.yaml"
    p.write_text(TINY_CONFIG)
    return str(p)


def csv_bytes(d):
    return {p.name: p.read_bytes() for p in sorted(d.glob("*.csv"))}


def test_repeat_is_byte_identical(tmp_path, cfg):
    args = ["fig2", "--config", cfg, "--seed", "7", "--runs", "3", "--iters", "20"]
    assert main([*args, "--out", str(tmp_path / "a")]) == 0
    assert main([*args, "--out", str(tmp_path / "b"), "--workers", "2"]) == 0
    a, b = csv_bytes(tmp_path / "a"), csv_bytes(tmp_path / "b")
    assert a and a == b
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["seed"] == 7
    assert manifest["config"]["runs"] == 3
    assert len(manifest["summaries"]["fig2"]) == 8


def test_single_run_record(tmp_path):
    assert main(["single-run", "--algorithms", "dql", "--seed", "1", "--iters", "10",
                 "--out", str(tmp_path)]) == 0
    rec = json.loads((tmp_path / "run_dql.json").read_text())
    assert len(rec["fidelity_trace"]) == 10
    assert rec["seed"] == [1, 0]
    assert set(rec["best_sequence"]) == {"dt", "values"}


@pytest.mark.parametrize("argv", [["fig7"], ["fig2", "--nope"], ["fig2", "--runs", "x"], []])
def test_usage_errors_exit_one(argv, capsys):
    assert main(argv) == 1
    assert "usage" in capsys.readouterr().err


def test_config_errors_exit_one(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("runs: 0\n")
    assert main(["fig2", "--config", str(bad), "--out", str(tmp_path)]) == 1
    assert main(["fig2", "--algorithms", "grape", "--out", str(tmp_path)]) == 1
    assert main(["fig2", "--config", str(tmp_path / "missing.yaml")]) == 1
    assert main(["fig2", "--seed", "-1", "--out", str(tmp_path)]) == 1


def test_unwritable_default_exits_two(tmp_path, monkeypatch):
    blocker = tmp_path / "file"
    blocker.write_text("")
    monkeypatch.setenv("QSTATEBENCH_OUT", str(blocker / "sub"))
    assert main(["single-run", "--algorithms", "krotov", "--iters", "2"]) == 2


def test_console_entry_point(tmp_path):
    env = {**os.environ, "QSTATEBENCH_OUT": str(tmp_path)}
    proc = subprocess.run([sys.executable, "-m", "qstatebench.cli", "single-run", "--algorithms", "sgd",
                           "--iters", "3"], capture_output=True, text=True, env=env)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "run_sgd.json").exists()
    assert (tmp_path / "manifest.json").exists()
