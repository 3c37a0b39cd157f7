#!/usr/bin/env python3
"""Print per-seed verdicts for the multi-seed criteria from ``run_seeds.py`` outputs.

Example:
    python3 scripts/acceptance_report.py --partisan runs/partisan.json --symmetric runs/sym.json \
        --power-pos runs/pos.json --power-neg runs/neg.json
"""
from __future__ import annotations

import argparse
import json
from collections import Counter
from pathlib import Path

from drifters.alignment import METHODS
from drifters.batch import bias_detected, bias_null_ok, scenario_patterns, summary_from_dict
from drifters.behavior import GROUPS


def load(path):
    return [summary_from_dict(d) for d in json.loads(Path(path).read_text(encoding="utf-8"))]


def fmt(x):
    return "   nan" if x is None else f"{x:6.3f}"


def report_partisan(runs):
    print("paper-like: group means (growth_slope / density / lowcred / overlap)")
    for s in runs:
        cells = "  ".join(f"{g[:6]:>6}:" + "/".join(fmt(s.means[g][k]) for k in
                          ("growth_slope", "density", "lowcred", "overlap")) for g in GROUPS)
        print(f"  seed {s.seed}: {cells}")
    verdicts = [scenario_patterns(s) for s in runs]
    for k in verdicts[0]:
        print(f"  {k:8s} holds in {sum(v[k] for v in verdicts)}/{len(runs)} seeds")
    for m in METHODS:
        ok = sum(bias_null_ok(s, m) for s in runs)
        ps = ", ".join(f"{s.bias[m]['p']:.3f}" for s in runs)
        print(f"  bias null {m}: {ok}/{len(runs)} (p = {ps})")


def report_power(runs, sign):
    for m in METHODS:
        ok = sum(bias_detected(s, m, sign) for s in runs)
        ts = ", ".join(f"{s.bias[m]['statistic']:+.1f}" for s in runs)
        print(f"  delta sign {sign:+d} {m}: {ok}/{len(runs)} detected (t = {ts})")


def report_symmetric(runs):
    quiet = sum(not s.significant() for s in runs)
    print(f"symmetric-control: {quiet}/{len(runs)} seeds without Bonferroni-significant comparisons")
    hits = Counter((c["metric"], c["group_a"], c["group_b"]) for s in runs for c in s.significant())
    for (metric, a, b), n in hits.most_common():
        print(f"  {metric:24s} {a:>6}-{b:<6} significant in {n} seeds")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--partisan")
    ap.add_argument("--symmetric")
    ap.add_argument("--power-pos")
    ap.add_argument("--power-neg")
    args = ap.parse_args()
    if args.partisan:
        report_partisan(load(args.partisan))
    if args.power_pos or args.power_neg:
        print("biased feed power")
        if args.power_pos:
            report_power(load(args.power_pos), +1)
        if args.power_neg:
            report_power(load(args.power_neg), -1)
    if args.symmetric:
        report_symmetric(load(args.symmetric))


if __name__ == "__main__":
    main()
