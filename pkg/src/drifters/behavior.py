"""Neutral drifter behavior engine.

Each wake the drifter draws an action, then a source conditional on the
action, then a target from the source, and finally sleeps for a bursty
power-law interval. The engine only talks to the platform through its query
and mutation API; it never inspects alignment, automation or credibility
attributes of accounts or tweets.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from drifters.platform import MINUTES_PER_DAY, Tweet, World

ACTIONS = ("reply", "tweet", "retweet", "like", "follow", "unfollow")

SOURCES = (
    "mention_timeline",
    "random_quotes",
    "trends",
    "home_timeline",
    "liked_by_friends",
    "friends_of_friends",
    "followers",
    "friends",
)

GROUPS = ("Left", "CLeft", "Center", "CRight", "Right")

DEFAULT_ACTION_PROBS = {
    "reply": 0.05,
    "tweet": 0.15,
    "retweet": 0.10,
    "like": 0.35,
    "follow": 0.25,
    "unfollow": 0.10,
}

_TWEET_SOURCES = {"trends": 0.1, "home_timeline": 0.6, "liked_by_friends": 0.3}

DEFAULT_SOURCE_PROBS = {
    "reply": {"mention_timeline": 1.0},
    "tweet": {"random_quotes": 0.3, "trends": 0.3, "home_timeline": 0.4},
    "retweet": dict(_TWEET_SOURCES),
    "like": dict(_TWEET_SOURCES),
    "follow": {"home_timeline": 0.2, "liked_by_friends": 0.2, "friends_of_friends": 0.5, "followers": 0.1},
    "unfollow": {"friends": 1.0},
}

DEFAULT_PHRASES = (
    "Wow!",
    "Maybe so.",
    "Interesting.",
    "Hmm, not sure.",
    "Good point.",
    "Really?",
    "I see.",
    "Thanks for sharing.",
    "That's something.",
    "Could be.",
)

QUOTES = (
    "The only way to do great work is to love what you do.",
    "Simplicity is the ultimate sophistication.",
    "Well begun is half done.",
    "Fortune favors the bold.",
    "Knowledge is power.",
    "Time is a great teacher.",
    "The journey of a thousand miles begins with one step.",
    "What we think, we become.",
    "Nothing will come of nothing.",
    "All that glitters is not gold.",
    "Brevity is the soul of wit.",
    "To be or not to be, that is the question.",
    "A person who never made a mistake never tried anything new.",
    "Imagination is more important than knowledge.",
    "The unexamined life is not worth living.",
    "Whatever you are, be a good one.",
    "Do not count your chickens before they hatch.",
    "Patience is bitter, but its fruit is sweet.",
    "Stay hungry, stay foolish.",
    "Every moment is a fresh beginning.",
    "The best way out is always through.",
    "Hope is a waking dream.",
    "Little by little, one travels far.",
    "Where there is love there is life.",
)


class BehaviorError(Exception):
    pass


@dataclass
class BehaviorConfig:
    action_probs: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_ACTION_PROBS))
    source_probs: dict[str, dict[str, float]] = field(
        default_factory=lambda: {a: dict(s) for a, s in DEFAULT_SOURCE_PROBS.items()}
    )
    alpha: float = 0.9
    min_interval: float = 1.0  # minutes
    max_sleep: float = 7 * 60.0  # minutes
    target_rate: tuple[float, float] = (20.0, 30.0)  # actions per day
    sleep_start: int = 0  # minute of day, inclusive
    sleep_end: int = 7 * 60  # minute of day, exclusive
    follow_margin: int = 113
    min_friends_for_unfollow: int = 50
    interval_scale: float | None = None  # None: calibrate from target_rate
    language: str = "en"
    home_window: int = 15
    mention_window: int = 10
    fof_friends: int = 3
    fof_window: int = 5000
    friends_window: int = 200
    followers_window: int = 200
    liked_max_friends: int = 10
    likes_per_friend: int = 3
    trend_topics: int = 3
    trend_top: int = 5
    initial_friends: int = 5
    initial_followers: int = 5

    def __post_init__(self):
        self.target_rate = tuple(self.target_rate)
        if set(self.action_probs) != set(ACTIONS):
            raise ValueError(f"action_probs must cover exactly {ACTIONS}")
        if abs(sum(self.action_probs.values()) - 1.0) > 1e-9:
            raise ValueError("action probabilities must sum to 1")
        for action, probs in self.source_probs.items():
            if action not in ACTIONS:
                raise ValueError(f"unknown action {action!r}")
            if not set(probs) <= set(SOURCES):
                raise ValueError(f"unknown source in {action!r}: {set(probs) - set(SOURCES)}")
            if any(p < 0 for p in probs.values()):
                raise ValueError(f"negative source probability for {action!r}")
            if abs(sum(probs.values()) - 1.0) > 1e-9:
                raise ValueError(f"source probabilities for {action!r} must sum to 1")
        if any(p < 0 for p in self.action_probs.values()):
            raise ValueError("negative action probability")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if not 0 < self.min_interval < self.max_sleep:
            raise ValueError("need 0 < min_interval < max_sleep")
        # sampling walks the dicts in order, so fix it regardless of how they were built
        self.action_probs = {a: float(self.action_probs[a]) for a in ACTIONS}
        self.source_probs = {
            a: {s: float(self.source_probs[a][s]) for s in SOURCES if s in self.source_probs[a]}
            for a in ACTIONS if a in self.source_probs
        }

    @property
    def awake_minutes(self) -> float:
        return MINUTES_PER_DAY - (self.sleep_end - self.sleep_start)


@dataclass
class PhraseBook:
    canned_phrases: tuple[str, ...] = DEFAULT_PHRASES

    def __post_init__(self):
        if not self.canned_phrases:
            raise ValueError("phrase book must not be empty")

    def pick(self, rng: random.Random) -> str:
        return rng.choice(self.canned_phrases)


@dataclass
class DrifterState:
    account: int
    group: str
    initial_friend: int
    next_wake: float
    interval_scale: float
    rng: random.Random
    replied_mentions_watermark: int = -1


@dataclass(frozen=True)
class Event:
    tick: int
    account: int
    action: str
    source: str
    target: int | None
    outcome: str  # "ok" or "skip:<reason>"

    @property
    def skipped(self) -> bool:
        return self.outcome != "ok"


# -- timing ---------------------------------------------------------------
def truncated_power_law_mean(alpha: float, lo: float, hi: float) -> float:
    """Mean of the density proportional to t**-alpha on [lo, hi]."""

    def integral(k):  # integral of t**(k - alpha) over [lo, hi]
        e = k + 1 - alpha
        if abs(e) < 1e-12:
            return math.log(hi / lo)
        return (hi**e - lo**e) / e

    return integral(1) / integral(0)


def sample_truncated_power_law(rng: random.Random, alpha: float, lo: float, hi: float) -> float:
    u = rng.random()
    if abs(alpha - 1.0) < 1e-12:
        return lo * (hi / lo) ** u
    e = 1.0 - alpha
    a, b = lo**e, hi**e
    return (a + u * (b - a)) ** (1.0 / e)


def next_interval(rng: random.Random, config: BehaviorConfig, interval_scale: float = 1.0) -> float:
    """Scaled gap in minutes; never exceeds ``config.max_sleep`` for scale <= 1."""
    dt = sample_truncated_power_law(rng, config.alpha, config.min_interval, config.max_sleep)
    return min(dt * interval_scale, config.max_sleep)


def scale_for_rate(mean_interval: float, band: tuple[float, float], awake_minutes: float,
                   max_scale: float = 1.0) -> float:
    """Scale putting ``awake_minutes / (scale * mean_interval)`` at the band midpoint.

    Scales above ``max_scale`` would stretch gaps past the sleep cutoff, so they
    are rejected as infeasible.
    """
    lo, hi = band
    if not 0 < lo <= hi:
        raise BehaviorError(f"invalid target band {band}")
    rate = 0.5 * (lo + hi)
    s = awake_minutes / (rate * mean_interval)
    if s > max_scale:
        raise BehaviorError(
            f"target band {band}/day infeasible: needs interval scale {s:.3g} > {max_scale}"
        )
    return s


def calibrate_interval_scale(config: BehaviorConfig) -> float:
    mean = truncated_power_law_mean(config.alpha, config.min_interval, config.max_sleep)
    return scale_for_rate(mean, config.target_rate, config.awake_minutes)


def resolve_scale(config: BehaviorConfig) -> float:
    return config.interval_scale if config.interval_scale is not None else calibrate_interval_scale(config)


def push_past_sleep(t: float, config: BehaviorConfig) -> float:
    day, minute = divmod(t, MINUTES_PER_DAY)
    if config.sleep_start <= minute < config.sleep_end:
        return day * MINUTES_PER_DAY + config.sleep_end
    return t


# -- selection -------------------------------------------------------------
def follow_allowed(config: BehaviorConfig, friends: int, followers: int) -> bool:
    return friends < followers + config.follow_margin


def unfollow_allowed(config: BehaviorConfig, friends: int) -> bool:
    return friends >= config.min_friends_for_unfollow


def _draw(rng: random.Random, probs: dict[str, float]) -> str:
    x = rng.random()
    acc = 0.0
    last = None
    for key, p in probs.items():
        acc += p
        last = key
        if x < acc:
            return key
    return last


def draw_action(rng: random.Random, config: BehaviorConfig) -> str:
    return _draw(rng, config.action_probs)


def apply_constraints(action: str, config: BehaviorConfig, friends: int, followers: int) -> str:
    if action == "follow" and not follow_allowed(config, friends, followers):
        return "unfollow"
    if action == "unfollow" and not unfollow_allowed(config, friends):
        return "follow"
    return action


def select_action(rng: random.Random, config: BehaviorConfig, world: World, drifter: DrifterState) -> str:
    action = draw_action(rng, config)
    return apply_constraints(action, config, world.friend_count(drifter.account),
                             world.follower_count(drifter.account))


def select_source(rng: random.Random, config: BehaviorConfig, action: str) -> str:
    if action not in config.source_probs:
        raise BehaviorError(f"unknown action {action!r}")
    return _draw(rng, config.source_probs[action])


# -- sources ---------------------------------------------------------------
def _original(world: World, tw: Tweet) -> Tweet:
    return world.tweets[tw.ref] if tw.kind == "retweet" else tw


def home_tweets(world: World, drifter: DrifterState, config: BehaviorConfig) -> list[Tweet]:
    home = world.curate_home_timeline(drifter.account, config.home_window, rng=drifter.rng)
    return [t for t in home if t.language == config.language]


def trend_tweets(world: World, drifter: DrifterState, config: BehaviorConfig) -> list[Tweet]:
    out = []
    for _, tweets in world.trends(config.trend_topics, config.trend_top, rng=drifter.rng):
        out.extend(t for t in tweets if t.language == config.language)
    return out


def liked_by_friends(world: World, drifter: DrifterState, config: BehaviorConfig) -> list[Tweet]:
    me = drifter.account
    home = world.curate_home_timeline(me, config.home_window, rng=drifter.rng)
    posters = list(dict.fromkeys(t.author for t in home if t.author != me))
    if len(posters) > config.liked_max_friends:
        posters = drifter.rng.sample(posters, config.liked_max_friends)
    out = []
    for f in posters:
        for t in world.likes_of(f, config.likes_per_friend):
            if t.author != me and t.language == config.language:
                out.append(t)
    return out


def friends_of_friends(world: World, drifter: DrifterState, config: BehaviorConfig) -> list[int]:
    """Combined candidate list; duplicates are kept so uniform picks favor shared friends."""
    me = drifter.account
    friends = world.friends(me)
    pick = list(friends)
    if len(pick) > config.fof_friends:
        pick = drifter.rng.sample(pick, config.fof_friends)
    out = []
    for f in pick:
        for c in world.friends_of_friend_latest(f, config.fof_window):
            if c != me and c not in friends and _lang_ok(world, c, config):
                out.append(c)
    return out


def unfollow_weights(world: World, drifter: DrifterState, config: BehaviorConfig) -> tuple[list[int], list[int]]:
    """Latest friends with rank weights (newest friend has rank 1)."""
    latest = world.friends_latest(drifter.account, config.friends_window)
    cands, weights = [], []
    for rank, f in enumerate(latest, start=1):
        if f != drifter.initial_friend:
            cands.append(f)
            weights.append(rank)
    return cands, weights


def _lang_ok(world: World, account: int, config: BehaviorConfig) -> bool:
    return world.accounts[account].language == config.language


def _follow_candidates(world: World, drifter: DrifterState, config: BehaviorConfig, source: str) -> list[int]:
    me = drifter.account
    friends = world.friends(me)

    def keep(c):
        return c != me and c not in friends and _lang_ok(world, c, config)

    if source == "home_timeline":
        authors = (_original(world, t).author for t in home_tweets(world, drifter, config))
        return [c for c in dict.fromkeys(authors) if keep(c)]
    if source == "liked_by_friends":
        # one tweet is drawn from the combined list, then its author is followed
        return [t.author for t in liked_by_friends(world, drifter, config) if keep(t.author)]
    if source == "friends_of_friends":
        return friends_of_friends(world, drifter, config)
    if source == "followers":
        return [c for c in world.followers_latest(me, config.followers_window) if keep(c)]
    raise BehaviorError(f"source {source!r} not valid for follow")


def _tweet_candidates(world: World, drifter: DrifterState, config: BehaviorConfig, source: str) -> list[Tweet]:
    if source == "home_timeline":
        return home_tweets(world, drifter, config)
    if source == "trends":
        return trend_tweets(world, drifter, config)
    if source == "liked_by_friends":
        return liked_by_friends(world, drifter, config)
    raise BehaviorError(f"source {source!r} not valid for tweet selection")


# -- execution -------------------------------------------------------------
def execute_action(world: World, drifter: DrifterState, action: str, source: str,
                   config: BehaviorConfig, phrases: PhraseBook | None = None) -> Event:
    if source not in config.source_probs.get(action, {}):
        raise BehaviorError(f"invalid action/source pair ({action}, {source})")
    phrases = phrases or PhraseBook()
    rng = drifter.rng
    me = drifter.account
    target: int | None = None
    outcome = "ok"

    if action == "reply":
        mentions = [t for t in world.mention_timeline(me, config.mention_window,
                                                      after=drifter.replied_mentions_watermark)
                    if t.language == config.language]
        if not mentions:
            outcome = "skip:empty_source"
        else:
            oldest = min(mentions, key=lambda t: t.id)
            target = world.post_tweet(me, "reply", oldest.id, text=phrases.pick(rng))
            drifter.replied_mentions_watermark = oldest.id

    elif action == "tweet":
        if source == "random_quotes":
            target = world.post_tweet(me, "original", text=rng.choice(QUOTES))
        else:
            cands = _tweet_candidates(world, drifter, config, source)
            if not cands:
                outcome = "skip:empty_source"
            else:
                picked = _original(world, rng.choice(cands))
                if source == "trends":
                    target = world.post_tweet(me, "original", hashtags=picked.hashtags,
                                              links=picked.links, text=picked.text, lean=picked.lean)
                else:
                    text = f"{phrases.pick(rng)} https://twitter.com/i/status/{picked.id}"
                    target = world.post_tweet(me, "quote", picked.id, text=text, lean=picked.lean)

    elif action in ("retweet", "like"):
        cands = [_original(world, t) for t in _tweet_candidates(world, drifter, config, source)]
        cands = [t for t in cands if t.author != me]
        if not cands:
            outcome = "skip:empty_source"
        else:
            picked = rng.choice(cands)
            target = picked.id
            if action == "retweet":
                if world.has_retweeted(me, picked.id):
                    outcome = "skip:already_retweeted"
                else:
                    world.post_tweet(me, "retweet", picked.id)
            elif not world.like(me, picked.id):
                outcome = "skip:already_liked"

    elif action == "follow":
        cands = _follow_candidates(world, drifter, config, source)
        if not cands:
            outcome = "skip:empty_source"
        else:
            target = rng.choice(cands)
            world.follow(me, target)

    elif action == "unfollow":
        cands, weights = unfollow_weights(world, drifter, config)
        if not cands:
            outcome = "skip:empty_source"
        else:
            target = rng.choices(cands, weights=weights)[0]
            assert target != drifter.initial_friend
            world.unfollow(me, target)

    else:
        raise BehaviorError(f"unknown action {action!r}")

    world.note("act", me, {"action": action, "source": source, "target": target}, outcome)
    return Event(world.clock, me, action, source, target, outcome)


# -- lifecycle -------------------------------------------------------------
def initialize_drifter(world: World, seed_account: int, rng: random.Random,
                       config: BehaviorConfig | None = None, group: str = "Center",
                       start: float | None = None) -> DrifterState:
    """Create a drifter that follows the seed, 5 of its friends and 5 of its followers."""
    config = config or BehaviorConfig()
    friend_pool = [f for f in world.friends_latest(seed_account, world.friend_count(seed_account))
                   if _lang_ok(world, f, config)]
    if len(friend_pool) < config.initial_friends:
        raise BehaviorError(
            f"seed {seed_account}: friends pool has {len(friend_pool)} eligible accounts, "
            f"need {config.initial_friends}"
        )
    friend_pool.sort()
    picked_friends = rng.sample(friend_pool, config.initial_friends)
    taken = set(picked_friends)
    follower_pool = sorted(
        f for f in world.followers(seed_account)
        if f not in taken and _lang_ok(world, f, config)
    )
    if len(follower_pool) < config.initial_followers:
        raise BehaviorError(
            f"seed {seed_account}: followers pool has {len(follower_pool)} eligible accounts, "
            f"need {config.initial_followers}"
        )
    picked_followers = rng.sample(follower_pool, config.initial_followers)

    scale = resolve_scale(config)
    me = world.create_account(automation_score=1.0, activity_rate=0.5 * sum(config.target_rate),
                              language=config.language, label=f"drifter:{group}")
    world.follow(me, seed_account)
    for f in picked_friends + picked_followers:
        world.follow(me, f)
    start = world.clock if start is None else start
    state = DrifterState(me, group, seed_account, 0.0, scale, rng)
    state.next_wake = push_past_sleep(start + next_interval(rng, config, scale), config)
    return state


def schedule_next(drifter: DrifterState, config: BehaviorConfig) -> None:
    t = drifter.next_wake + next_interval(drifter.rng, config, drifter.interval_scale)
    drifter.next_wake = push_past_sleep(t, config)


def drifter_step(world: World, drifter: DrifterState, config: BehaviorConfig,
                 phrases: PhraseBook | None = None) -> Event:
    """One wake: act at ``next_wake`` then schedule the following wake."""
    world.advance(max(world.clock, int(drifter.next_wake)))
    action = select_action(drifter.rng, config, world, drifter)
    source = select_source(drifter.rng, config, action)
    event = execute_action(world, drifter, action, source, config, phrases)
    schedule_next(drifter, config)
    return event


def run_drifter_day(world: World, drifter: DrifterState, config: BehaviorConfig,
                    phrases: PhraseBook | None = None) -> list[Event]:
    """Run every wake of the drifter that falls in the current simulated day."""
    day_end = (world.clock // MINUTES_PER_DAY + 1) * MINUTES_PER_DAY
    events = []
    while drifter.next_wake < day_end:
        events.append(drifter_step(world, drifter, config, phrases))
    world.advance(max(world.clock, day_end - 1))
    return events
