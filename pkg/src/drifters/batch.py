"""Multi-seed batches and the per-seed summaries used to judge scenario recovery."""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from drifters.alignment import METHODS
from drifters.behavior import GROUPS
from drifters.harness import (
    GROUP_METRICS,
    ExperimentConfig,
    RunResult,
    drifter_summary,
    group_means,
    pooled_bias_test,
    run_experiment,
)
from drifters.stats import bonferroni, ttest_two_sample


@dataclass
class SeedSummary:
    """Compact per-run numbers; everything the multi-seed criteria look at."""

    seed: int
    scenario: str
    feed: str
    bias_strength: float
    seconds: float
    bias: dict[str, dict[str, float | None]] = field(default_factory=dict)
    means: dict[str, dict[str, float | None]] = field(default_factory=dict)
    comparisons: list[dict] = field(default_factory=list)

    def significant(self, alpha: float = 0.05) -> list[dict]:
        return [c for c in self.comparisons if c["p_bonferroni"] is not None and c["p_bonferroni"] < alpha]


def pairwise_drifter_tests(result: RunResult, metrics: Sequence[str] = GROUP_METRICS) -> list[dict]:
    """Two-sample tests of every per-drifter metric for every group pair.

    The Bonferroni family size is the number of planned comparisons,
    so untestable cells (too few values) still count against alpha.
    """
    per = drifter_summary(result)
    members = {g: [d.account for d in result.drifters if d.group == g] for g in GROUPS}
    pairs = list(itertools.combinations(GROUPS, 2))
    m = len(pairs) * len(metrics)
    rows = []
    for a, b in pairs:
        for metric in metrics:
            x = [per[d][metric] for d in members[a] if per[d][metric] is not None]
            y = [per[d][metric] for d in members[b] if per[d][metric] is not None]
            res = ttest_two_sample(x, y) if len(x) >= 2 and len(y) >= 2 else None
            rows.append({
                "metric": metric, "group_a": a, "group_b": b,
                "statistic": None if res is None else res.statistic,
                "p": None if res is None else res.p,
                "p_bonferroni": None if res is None else bonferroni(res.p, m),
            })
    return rows


def summarize(result: RunResult, seconds: float = 0.0) -> SeedSummary:
    cfg = result.config
    s = SeedSummary(cfg.seed, cfg.scenario, cfg.feed, cfg.bias_strength, seconds)
    for m in METHODS:
        r = pooled_bias_test(result, m)
        s.bias[m] = {"statistic": r.statistic, "p": r.p, "d": r.effect, "n": r.n[0]}
    s.means = {g: {k: v[0] for k, v in row.items()} for g, row in group_means(result).items()}
    s.comparisons = pairwise_drifter_tests(result)
    return s


def run_seeds(base: ExperimentConfig, seeds: Iterable[int], log=None) -> list[SeedSummary]:
    """Run ``base`` once per master seed, in memory, and summarize each run."""
    out = []
    for seed in seeds:
        cfg = replace(base, seed=seed)
        t0 = time.perf_counter()
        _, result = run_experiment(cfg)
        dt = time.perf_counter() - t0
        out.append(summarize(result, dt))
        if log is not None:
            log(f"{cfg.scenario} feed={cfg.feed} delta={cfg.bias_strength:+.2f} seed={seed}: {dt:.1f}s")
    return out


# -- per-seed verdicts ------------------------------------------------------------------
def _mean(*xs):
    return sum(xs) / len(xs)


def scenario_patterns(s: SeedSummary, lowcred_band: tuple[float, float] = (0.12, 0.18)) -> dict[str, bool]:
    """Qualitative orderings expected when partisan asymmetries are configured."""
    m = {g: s.means[g] for g in GROUPS}

    def val(g, k):
        v = m[g][k]
        return float("nan") if v is None else v

    lc = {g: val(g, "lowcred") for g in GROUPS}
    lo, hi = lowcred_band
    return {
        "growth": val("Left", "growth_slope") > val("Center", "growth_slope")
        and val("Right", "growth_slope") > val("Center", "growth_slope"),
        "density": val("Left", "density") > val("Center", "density")
        and val("Right", "density") > val("Center", "density"),
        "lowcred": all(lc["Right"] > lc[g] for g in GROUPS if g != "Right") and lo <= lc["Right"] <= hi,
        "overlap": val("Center", "overlap") < _mean(val("CLeft", "overlap"), val("CRight", "overlap"))
        < _mean(val("Left", "overlap"), val("Right", "overlap")),
    }


def bias_null_ok(s: SeedSummary, method: str, max_d: float = 0.1, alpha: float = 0.05) -> bool:
    b = s.bias[method]
    return b["d"] is not None and abs(b["d"]) < max_d and b["p"] > alpha


def bias_detected(s: SeedSummary, method: str, sign: int, alpha: float = 0.01) -> bool:
    b = s.bias[method]
    return b["statistic"] * sign > 0 and b["p"] < alpha


def summary_from_dict(d: dict) -> SeedSummary:
    return SeedSummary(**d)
