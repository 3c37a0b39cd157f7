#!/usr/bin/env python3
"""Run one scenario across several master seeds and dump per-seed summaries as JSON.

Example:
    python3 scripts/run_seeds.py --scenario paper-like --seeds 10 --days 120 --out runs/paper.json
    python3 scripts/run_seeds.py --feed biased --delta 0.8 --seeds 10 --out runs/power_pos.json
"""
from __future__ import annotations

import argparse
import json
from dataclasses import asdict
from pathlib import Path

from drifters.batch import run_seeds
from drifters.harness import ExperimentConfig
from drifters.worldgen import SCENARIOS


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--scenario", choices=SCENARIOS, default="paper-like")
    ap.add_argument("--feed", choices=("chronological", "biased"), default="chronological")
    ap.add_argument("--delta", type=float, default=0.0, help="curator bias strength for --feed biased")
    ap.add_argument("--seeds", type=int, default=10, help="master seeds 0..N-1")
    ap.add_argument("--first-seed", type=int, default=0)
    ap.add_argument("--days", type=int, default=120)
    ap.add_argument("--agents", type=int, default=2000)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    base = ExperimentConfig(scenario=args.scenario, feed=args.feed, bias_strength=args.delta,
                            duration_days=args.days, n_agents=args.agents, log_events=False)
    seeds = range(args.first_seed, args.first_seed + args.seeds)
    summaries = run_seeds(base, seeds, log=lambda s: print(s, flush=True))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps([asdict(s) for s in summaries], indent=1), encoding="utf-8")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
