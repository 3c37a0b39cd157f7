import json
import shutil

import pytest

from drifters import harness as hn
from drifters.batch import pairwise_drifter_tests, summarize
from drifters.behavior import GROUPS
from drifters.worldgen import ConfigError

SMALL = dict(n_agents=300, duration_days=3, corpus_sentences=4000, echo_shuffles=5, seed=11)


@pytest.fixture(scope="module")
def run(tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    manifest, result = hn.run_experiment(hn.ExperimentConfig(**SMALL), out)
    return out, manifest, result


def test_substreams_are_stable_and_distinct():
    a = hn.substream_seed(5, 1, 0)
    assert a == hn.substream_seed(5, 1, 0)
    assert len({hn.substream_seed(5, 1, i) for i in range(100)}) == 100
    assert a != hn.substream_seed(6, 1, 0)
    assert hn.substream_seed(5, 1) != hn.substream_seed(5, 1, 0)


def test_config_round_trip_through_json():
    cfg = hn.ExperimentConfig(**SMALL)
    back = hn.ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict(), sort_keys=True)))
    assert back == cfg
    assert back.digest() == cfg.digest()


@pytest.mark.parametrize("bad", [
    {"duration_days": 0}, {"scenario": "utopia"}, {"feed": "ranked"}, {"bias_strength": 3.0},
    {"n_groups": 4}, {"warmup_days": -1},
])
def test_config_validation(bad):
    with pytest.raises((ConfigError, ValueError)):
        hn.ExperimentConfig(**bad)


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError):
        hn.ExperimentConfig.from_dict({"seeds": 3})


def test_run_writes_every_artifact(run):
    out, manifest, result = run
    assert manifest.status == "complete"
    for name in hn.REPORT_FILES + hn.MODEL_FILES + ("events.jsonl", "manifest.json"):
        assert (out / name).exists(), name
    assert set(manifest.artifacts) == set(hn.REPORT_FILES + hn.MODEL_FILES + ("events.jsonl",))
    assert len(result.drifters) == 15
    assert len(result.observations) == 15 * SMALL["duration_days"]
    assert [d.group for d in result.drifters] == [g for g in GROUPS for _ in range(3)]


def test_observations_are_plausible(run):
    _, _, result = run
    for o in result.observations:
        assert o.friends >= 1
        assert 0 <= o.actions_today <= 60
        for m in ("hashtag", "link"):
            for s in (o.s_h[m], o.s_u[m], o.s_f[m]):
                assert s is None or -2.0 <= s <= 2.0


def test_analyze_reproduces_reports(run, tmp_path):
    out, _, result = run
    again = hn.analyze_log(out, tmp_path)
    assert again.observations == result.observations
    for name in hn.REPORT_FILES:
        assert hn.file_sha256(tmp_path / name) == hn.file_sha256(out / name), name


def test_analyze_rejects_truncated_log(run, tmp_path):
    out, _, _ = run
    trunc = tmp_path / "trunc"
    shutil.copytree(out, trunc)
    lines = (trunc / "events.jsonl").read_text().splitlines()
    last_day = max(i for i, ln in enumerate(lines) if '"op":"day_end"' in ln and '"day":1' in ln)
    (trunc / "events.jsonl").write_text("\n".join(lines[:last_day + 1]) + "\n")
    with pytest.raises(hn.HarnessError, match="missing days 2"):
        hn.analyze_log(trunc)


def test_replay_is_byte_identical(run, tmp_path):
    out, _, _ = run
    rep = hn.replay_manifest(out / "manifest.json", tmp_path)
    assert rep.ok, rep.mismatched


def test_failed_runs_are_not_replayed(run, tmp_path):
    out, _, _ = run
    data = json.loads((out / "manifest.json").read_text())
    data["status"] = "failed"
    (tmp_path / "m.json").write_text(json.dumps(data))
    with pytest.raises(hn.HarnessError):
        hn.replay_manifest(tmp_path / "m.json", tmp_path / "o")


def test_seed_changes_the_run():
    _, a = hn.run_experiment(hn.ExperimentConfig(**{**SMALL, "duration_days": 1}))
    _, b = hn.run_experiment(hn.ExperimentConfig(**{**SMALL, "duration_days": 1, "seed": 12}))
    assert a.event_digest != b.event_digest


def test_summary_and_group_tables(run):
    out, _, result = run
    summary = json.loads((out / "summary.json").read_text())
    assert summary
    rows = hn.group_tests(result)
    assert {r["metric"] for r in rows} >= {"followers_increments", "followers_interaction", "followers_slopes"}
    for r in rows:
        if r["p_bonferroni"] is not None:
            assert r["result"].p <= r["p_bonferroni"] <= 1.0
    s = summarize(result)
    assert set(s.bias) == {"hashtag", "link"}
    comps = pairwise_drifter_tests(result)
    assert len(comps) == 10 * len(hn.GROUP_METRICS)
