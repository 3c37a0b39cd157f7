"""Derived measures and group comparisons over drifter observations.

Covers follower growth (three estimators), low-credibility exposure, bot
exposure, follow-back overlap and confounder correlations. The t-tests and
friends live in :mod:`drifters.stats` and are re-exported here.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from drifters.platform import Tweet, World, normalize_domain
from drifters.stats import (  # noqa: F401  (re-exported)
    TestResult,
    bonferroni,
    cohens_d,
    ols,
    ols_slope,
    pearson,
    ttest_paired,
    ttest_two_sample,
)

GROWTH_METHODS = ("increments", "interaction", "slopes")


@dataclass
class DailyObservation:
    drifter: int
    group: str
    day: int
    followers: int
    friends: int
    s_h: dict[str, float | None] = field(default_factory=dict)
    s_u: dict[str, float | None] = field(default_factory=dict)
    s_f: dict[str, float | None] = field(default_factory=dict)
    lowcred_share: float | None = None
    actions_today: int = 0
    # flagged links, links, flagged tweets, tweets, tweets with links
    lowcred_counts: tuple[int, int, int, int, int] = (0, 0, 0, 0, 0)

    def __post_init__(self):
        if self.followers < 0 or self.friends < 0 or self.actions_today < 0:
            raise ValueError("counts must be non-negative")


# -- follower growth ----------------------------------------------------------
def _series(observations: Iterable[DailyObservation], group: str) -> dict[int, list[tuple[int, int]]]:
    out: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for o in observations:
        if o.group == group:
            out[o.drifter].append((o.day, o.followers))
    for d, rows in out.items():
        rows.sort()
        if len(rows) < 2:
            raise ValueError(f"drifter {d} has {len(rows)} observation(s); need at least 2")
        days = [r[0] for r in rows]
        if len(set(days)) != len(days):
            raise ValueError(f"drifter {d} has duplicate days")
    if not out:
        raise ValueError(f"no observations for group {group!r}")
    return dict(out)


def _increments(series: Mapping[int, list[tuple[int, int]]]) -> list[float]:
    out = []
    for rows in series.values():
        for (d0, f0), (d1, f1) in zip(rows, rows[1:]):
            out.append((f1 - f0) / (d1 - d0))
    return out


def growth_rate_tests(observations: Sequence[DailyObservation], group_a: str, group_b: str) -> dict[str, TestResult]:
    """Compare follower growth of two groups three ways; positive effect means ``group_a`` grows faster.

    ``increments``: two-sample t-test on per-day follower increments, each
    divided by the elapsed days between consecutive observations.
    ``interaction``: OLS of followers on time, group and time x group; the
    interaction coefficient is tested.
    ``slopes``: per-drifter OLS slopes compared by a two-sample t-test.
    """
    sa, sb = _series(observations, group_a), _series(observations, group_b)
    res = {"increments": ttest_two_sample(_increments(sa), _increments(sb))}

    rows = [(d, f, 1.0) for s in sa.values() for d, f in s] + [(d, f, 0.0) for s in sb.values() for d, f in s]
    t = np.array([r[0] for r in rows], dtype=float)
    g = np.array([r[2] for r in rows])
    y = np.array([r[1] for r in rows], dtype=float)
    X = np.column_stack([np.ones_like(t), t, g, t * g])
    res["interaction"] = ols(X, y).coef_test(3, method="ols_interaction")

    def slopes(series):
        return [ols_slope([d for d, _ in s], [f for _, f in s]) for s in series.values()]

    res["slopes"] = ttest_two_sample(slopes(sa), slopes(sb))
    return res


# -- low-credibility exposure -----------------------------------------------------
@dataclass
class LowCredList:
    """Flagged domains with a provenance tag each; excluded domains are never flagged."""

    domains: dict[str, str]
    excluded: set[str] = field(default_factory=set)

    def __post_init__(self):
        self.domains = {normalize_domain(d): p for d, p in self.domains.items()}
        self.excluded = {normalize_domain(d) for d in self.excluded}
        if not set(self.domains) - self.excluded:
            raise ValueError("low-credibility list has no active domains")

    def flagged(self, domain: str) -> bool:
        d = normalize_domain(domain)
        return d in self.domains and d not in self.excluded

    def save(self, path: str | Path) -> None:
        by_prov: dict[str, list[str]] = defaultdict(list)
        for d, p in self.domains.items():
            by_prov[p].append(d)
        lines = []
        for p in sorted(by_prov):
            lines.append(f"# provenance: {p}")
            lines.extend(sorted(by_prov[p]))
        for d in sorted(self.excluded):
            lines.append(f"# excluded: {d}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "LowCredList":
        domains, excluded = {}, set()
        prov = "unknown"
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("provenance:"):
                    prov = body.split(":", 1)[1].strip()
                elif body.startswith("excluded:"):
                    excluded.add(body.split(":", 1)[1].strip())
                continue
            domains[line] = prov
        return cls(domains, excluded)


@dataclass(frozen=True)
class LowCredExposure:
    flagged_links: int
    links: int
    flagged_tweets: int
    tweets: int
    tweets_with_links: int

    @property
    def share(self) -> float | None:
        """Flagged links over all links; missing when there are no links."""
        return self.flagged_links / self.links if self.links else None

    @property
    def share_of_tweets(self) -> float | None:
        return self.flagged_tweets / self.tweets if self.tweets else None

    @property
    def share_of_linked_tweets(self) -> float | None:
        return self.flagged_tweets / self.tweets_with_links if self.tweets_with_links else None


def lowcred_exposure_of(tweets: Iterable[Tweet], lowcred: LowCredList) -> LowCredExposure:
    flagged_links = links = flagged_tweets = n = with_links = 0
    for tw in tweets:
        n += 1
        k = sum(1 for d in tw.links if lowcred.flagged(d))
        flagged_links += k
        links += len(tw.links)
        flagged_tweets += k > 0
        with_links += bool(tw.links)
    return LowCredExposure(flagged_links, links, flagged_tweets, n, with_links)


def lowcred_exposure(world: World, drifter: int, lowcred: LowCredList, window: int = 50,
                     home: Sequence[Tweet] | None = None) -> LowCredExposure:
    """Exposure in the drifter's home timeline (or an explicit ``home`` window)."""
    if home is None:
        home = world.curate_home_timeline(drifter, window)
    return lowcred_exposure_of(home, lowcred)


# -- bots and overlap --------------------------------------------------------------
@dataclass
class BotExposure:
    friend_scores: list[float]
    follower_scores: list[float]

    @property
    def friend_mean(self) -> float | None:
        return math.fsum(self.friend_scores) / len(self.friend_scores) if self.friend_scores else None

    @property
    def follower_mean(self) -> float | None:
        return math.fsum(self.follower_scores) / len(self.follower_scores) if self.follower_scores else None


def bot_exposure(world: World, drifter: int) -> BotExposure:
    """Ground-truth automation scores of the drifter's current friends and followers."""
    friends = [world.accounts[a].automation_score for a in world.friends(drifter)]
    followers = [world.accounts[a].automation_score for a in world.followers(drifter)]
    if not friends and not followers:
        raise ValueError(f"drifter {drifter} has neither friends nor followers")
    return BotExposure(friends, followers)


def group_bot_exposure(items: Iterable[BotExposure]) -> BotExposure:
    """Pool several drifters' score lists into one group-level distribution."""
    friends, followers = [], []
    for b in items:
        friends.extend(b.friend_scores)
        followers.extend(b.follower_scores)
    return BotExposure(friends, followers)


def jaccard(a: Iterable, b: Iterable) -> float | None:
    a, b = set(a), set(b)
    union = a | b
    if not union:
        return None
    return len(a & b) / len(union)


def followback_overlap(world: World, drifter: int) -> float | None:
    return jaccard(world.friends(drifter), world.followers(drifter))


# -- confounders -----------------------------------------------------------------------
def confounder_correlations(drifter_followers: Sequence[float], seed_specs: Sequence) -> tuple[TestResult, TestResult]:
    """Pearson tests of drifter follower counts against their seed's total and within-group popularity.

    ``seed_specs`` holds the seed spec of each drifter, aligned with ``drifter_followers``.
    """
    if len(drifter_followers) != len(seed_specs):
        raise ValueError("one seed spec per drifter is required")
    total = [float(s.popularity) for s in seed_specs]
    within = [float(s.within_group_popularity) for s in seed_specs]
    return pearson(drifter_followers, total), pearson(drifter_followers, within)
