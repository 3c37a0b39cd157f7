"""Command-line entry point: ``drifter-sim run|config|analyze|replay``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import tempfile
from pathlib import Path

import yaml

from drifters.behavior import DEFAULT_ACTION_PROBS, DEFAULT_SOURCE_PROBS
from drifters.harness import (
    REPORT_FILES,
    ExperimentConfig,
    HarnessError,
    analyze_log,
    file_sha256,
    replay_manifest,
    run_experiment,
)
from drifters.worldgen import SCENARIOS, ConfigError

log = logging.getLogger("drifters")


def load_config(path: str | None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping at the top level")
    # `config --dump` adds read-only "_" entries; skip them so a dump loads back
    return ExperimentConfig.from_dict({k: v for k, v in data.items() if not str(k).startswith("_")})


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    d = cfg.to_dict()
    if args.seed is not None:
        d["seed"] = args.seed
    if args.scenario is not None:
        d["scenario"] = args.scenario
    if args.days is not None:
        d["duration_days"] = args.days
    if args.agents is not None:
        d["n_agents"] = args.agents
    if args.no_log:
        d["log_events"] = False
    cfg = ExperimentConfig.from_dict(d)
    log.info("running %s seed=%d days=%d agents=%d -> %s", cfg.scenario, cfg.seed, cfg.duration_days,
             cfg.n_agents, args.out)
    manifest, _ = run_experiment(cfg, args.out)
    print((Path(args.out) / "summary.txt").read_text(encoding="utf-8"), end="")
    print(f"manifest: {Path(args.out) / 'manifest.json'}")
    return 0 if manifest.status == "complete" else 1


def cmd_config(args) -> int:
    cfg = load_config(args.config)
    if args.scenario is not None:
        cfg = ExperimentConfig.from_dict({**cfg.to_dict(), "scenario": args.scenario})
    if not args.dump:
        print("nothing to do; pass --dump", file=sys.stderr)
        return 2
    out = cfg.to_dict()
    # resolved world parameters for the chosen scenario, for reference only
    wc = cfg.world_config()
    out["_resolved_world"] = json.loads(json.dumps(wc, default=lambda o: o.__dict__))
    out["_action_probabilities"] = dict(DEFAULT_ACTION_PROBS)
    out["_source_probabilities"] = {a: dict(s) for a, s in DEFAULT_SOURCE_PROBS.items()}
    print(yaml.safe_dump(out, sort_keys=False), end="")
    return 0


def cmd_analyze(args) -> int:
    out = Path(args.out) if args.out else Path(args.run_dir) / "analysis"
    analyze_log(args.run_dir, out)
    run = Path(args.run_dir)
    diffs = [n for n in REPORT_FILES if (run / n).exists() and file_sha256(run / n) != file_sha256(out / n)]
    print(f"reports written to {out}")
    if diffs:
        print("differs from live run: " + ", ".join(diffs))
        return 1
    print("all reports identical to the live run")
    return 0


def cmd_replay(args) -> int:
    out = args.out or tempfile.mkdtemp(prefix="drifters-replay-")
    rep = replay_manifest(args.manifest, out)
    for name in rep.matched:
        print(f"ok        {name}")
    for name in rep.mismatched:
        print(f"MISMATCH  {name}")
    for name in rep.missing:
        print(f"MISSING   {name}")
    print("replay verified" if rep.ok else "replay FAILED")
    return 0 if rep.ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="drifter-sim", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment and write artifacts")
    r.add_argument("--config", help="YAML experiment config")
    r.add_argument("--seed", type=int)
    r.add_argument("--out", required=True, help="output directory")
    r.add_argument("--scenario", choices=SCENARIOS)
    r.add_argument("--days", type=int, help="override duration_days")
    r.add_argument("--agents", type=int, help="override n_agents")
    r.add_argument("--no-log", action="store_true", help="skip the event log (analyze will not work)")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("config", help="show the effective configuration")
    c.add_argument("--dump", action="store_true", help="print the config as YAML")
    c.add_argument("--config")
    c.add_argument("--scenario", choices=SCENARIOS)
    c.set_defaults(func=cmd_config)

    a = sub.add_parser("analyze", help="recompute reports from a run's event log")
    a.add_argument("run_dir")
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)

    rp = sub.add_parser("replay", help="re-run a manifest and verify artifact hashes")
    rp.add_argument("manifest")
    rp.add_argument("--out")
    rp.set_defaults(func=cmd_replay)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ConfigError, HarnessError, FileNotFoundError, ValueError) as exc:
        print(f"drifter-sim: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
