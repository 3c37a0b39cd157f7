import json

import pytest
import yaml

from drifters.cli import main

RUN_ARGS = ["--seed", "3", "--days", "2", "--agents", "300"]


def test_config_dump_is_loadable_yaml(capsys, tmp_path):
    assert main(["config", "--dump"]) == 0
    data = yaml.safe_load(capsys.readouterr().out)
    assert data["scenario"] == "paper-like"
    assert data["_action_probabilities"]["like"] == 0.35
    assert data["_resolved_world"]["homophily"] == 0.99
    # a dump, extras included, loads back as a config
    (tmp_path / "c.yaml").write_text(yaml.safe_dump(data))
    assert main(["config", "--dump", "--config", str(tmp_path / "c.yaml"), "--scenario",
                 "symmetric-control"]) == 0
    assert yaml.safe_load(capsys.readouterr().out)["scenario"] == "symmetric-control"


def test_config_without_dump_fails():
    assert main(["config"]) == 2


def test_bad_config_reports_error(tmp_path, capsys):
    p = tmp_path / "bad.yaml"
    p.write_text("duration_days: 0\n")
    assert main(["run", "--config", str(p), "--out", str(tmp_path / "o")]) == 2
    assert "duration_days" in capsys.readouterr().err
    p.write_text("not_a_key: 1\n")
    assert main(["run", "--config", str(p), "--out", str(tmp_path / "o")]) == 2


def test_run_analyze_replay(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["run", *RUN_ARGS, "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "manifest:" in text
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["duration_days"] == 2 and manifest["master_seed"] == 3

    assert main(["analyze", str(out)]) == 0
    assert "identical" in capsys.readouterr().out

    assert main(["replay", str(out / "manifest.json"), "--out", str(tmp_path / "again")]) == 0
    assert "replay verified" in capsys.readouterr().out


def test_replay_flags_tampered_artifacts(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["run", *RUN_ARGS, "--out", str(out), "--no-log"]) == 0
    m = json.loads((out / "manifest.json").read_text())
    m["artifacts"]["summary.txt"] = "0" * 64
    (out / "manifest.json").write_text(json.dumps(m))
    capsys.readouterr()
    assert main(["replay", str(out / "manifest.json"), "--out", str(tmp_path / "again")]) == 1
    assert "MISMATCH  summary.txt" in capsys.readouterr().out
    # no event log, so analyze cannot work
    assert main(["analyze", str(out)]) == 2


def test_missing_manifest(tmp_path):
    assert main(["replay", str(tmp_path / "nope.json")]) == 2


def test_help_lists_subcommands(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    out = capsys.readouterr().out
    for cmd in ("run", "config", "analyze", "replay"):
        assert cmd in out
