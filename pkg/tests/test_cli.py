import json
import subprocess
import sys

import pytest

from dynring.cli import main

CONF = {"n": 3, "ids": ["01", "10", "11"], "positions": [0, 1, 2], "mode": "chiral", "adversary": {"kind": "none"}}


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_run_success_writes_trace(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", CONF)
    trace = tmp_path / "t.jsonl"
    assert main(["run", "--config", cfg, "--trace", str(trace)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["ok"] and summary["bound"] == 197
    lines = trace.read_text().splitlines()
    assert len(lines) == summary["rounds_elapsed"]
    assert json.loads(lines[0])["round"] == 0


def test_run_output_is_byte_identical(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {**CONF, "adversary": {"kind": "random", "seed": 3}})
    outs = []
    for name in ("a.jsonl", "b.jsonl"):
        main(["run", "--config", cfg, "--trace", str(tmp_path / name)])
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()


def test_run_duplicate_ids_exit_4(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {**CONF, "ids": ["01", "01", "11"]})
    assert main(["run", "--config", cfg]) == 4
    assert "ids" in capsys.readouterr().err


def test_run_forced_overrun_exit_3(tmp_path):
    cfg = write(tmp_path, "c.json", {**CONF, "max_rounds": 1})
    assert main(["run", "--config", cfg]) == 3


def test_run_missing_config_exit_4(tmp_path):
    assert main(["run", "--config", str(tmp_path / "nope.json")]) == 4


def test_run_seed_override_changes_adversary(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {**CONF, "n": 7, "adversary": {"kind": "random", "seed": 1}})
    assert main(["run", "--config", cfg, "--seed-override", "2"]) == 0
    assert main(["run", "--config", cfg, "--max-rounds-multiplier", "0.01"]) == 3


def test_batch_exit_codes(tmp_path, capsys):
    good = {
        "name": "tiny",
        "mode": "chiral",
        "n": [4, 5],
        "id_sets": [{"triples": [["01", "10", "11"]]}],
        "adversaries": [{"kind": "none"}, {"kind": "random", "seeds": 2}],
    }
    assert main(["batch", "--manifest", write(tmp_path, "m.json", good), "--jobs", "1"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["cells"] == 6 and report["failed"] == 0
    assert main(["batch", "--manifest", write(tmp_path, "e.json", {}), "--jobs", "1"]) == 4
    m = write(tmp_path, "m.json", good)
    assert main(["batch", "--manifest", m, "--jobs", "1", "--max-rounds-multiplier", "0.01"]) == 3


@pytest.mark.parametrize(
    "argv, code",
    [
        (["oracle", "lemma-main", "--n", "3"], 0),
        (["oracle", "agreement", "--k", "4"], 0),
        (["oracle", "contiguous", "--k", "3", "--j", "4"], 0),
        (["oracle", "lemma-main", "--n", "12"], 4),
        (["oracle", "divination"], 4),
        (["launch"], 4),
    ],
)
def test_oracle_exit_codes(argv, code, capsys):
    assert main(argv) == code
    if code == 0:
        assert json.loads(capsys.readouterr().out)["passed"] is True


def test_oracle_output_is_stable(capsys):
    main(["oracle", "agreement", "--k", "3"])
    a = capsys.readouterr().out
    main(["oracle", "agreement", "--k", "3"])
    assert a == capsys.readouterr().out


def test_module_entry_point_and_logging(tmp_path):
    cfg = write(tmp_path, "c.json", CONF)
    proc = subprocess.run(
        [sys.executable, "-m", "dynring", "run", "--config", cfg, "--trace", str(tmp_path / "t.jsonl")],
        capture_output=True,
        text=True,
        env={"DYNRING_LOG": "info", "PATH": ""},
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["ok"]
    assert "wrote" in proc.stderr
