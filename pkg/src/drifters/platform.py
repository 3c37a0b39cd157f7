"""Simulated micro-blogging platform.

A :class:`World` holds accounts, a directed follow graph, an append-only tweet
store, likes and a simulated clock. Every mutation is written to an optional
:class:`EventLog` (JSON Lines) so a run can be rebuilt from its log alone.

Timestamps are integer minutes since the simulation epoch. Tweet ids grow
monotonically with time, so "most recent" always means "largest id".
"""
from __future__ import annotations

import hashlib
import heapq
import itertools
import json
import math
import random
from collections import Counter
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Callable, Iterable

SNAPSHOT_FORMAT = "drifters.world"
SNAPSHOT_VERSION = 1

MINUTES_PER_DAY = 1440
TREND_WINDOW = MINUTES_PER_DAY
BIASED_POOL_FACTOR = 5

TWEET_KINDS = ("original", "retweet", "reply", "quote")


class PlatformError(Exception):
    """Invalid platform operation (missing entity, bad argument)."""


@dataclass(slots=True)
class Account:
    id: int
    created_at: int = 0
    automation_score: float = 0.0
    alignment: float = 0.0
    low_cred_propensity: float = 0.0
    activity_rate: float = 0.0
    language: str = "en"
    label: str = ""


@dataclass(slots=True)
class Tweet:
    id: int
    author: int
    created_at: int
    kind: str = "original"
    ref: int | None = None
    hashtags: tuple[str, ...] = ()
    links: tuple[str, ...] = ()
    text: str = ""
    language: str = "en"
    # ground-truth lean of the content; read only by the biased curator
    lean: float = 0.0


@dataclass(frozen=True)
class FeedPolicy:
    kind: str = "chronological"
    bias_strength: float = 0.0

    def __post_init__(self):
        if self.kind not in ("chronological", "biased"):
            raise ValueError(f"unknown feed policy {self.kind!r}")
        if not -1.0 <= self.bias_strength <= 1.0:
            raise ValueError("bias_strength must lie in [-1, 1]")


def normalize_hashtag(tag: str) -> str:
    tag = tag.strip().lower()
    return tag if tag.startswith("#") else "#" + tag


def normalize_domain(domain: str) -> str:
    d = domain.strip().lower()
    for prefix in ("https://", "http://"):
        if d.startswith(prefix):
            d = d[len(prefix):]
    d = d.split("/", 1)[0]
    if d.startswith("www."):
        d = d[4:]
    return d


class EventLog:
    """Append-only JSON Lines log of platform mutations.

    Records are ``{tick, op, actor, args, result}``. A running SHA-256 over the
    serialized lines gives a cheap determinism fingerprint.
    """

    def __init__(self, path: str | Path | None = None, keep: bool = False):
        self.path = Path(path) if path is not None else None
        self._fh = open(self.path, "w", encoding="utf-8") if self.path else None
        self.records: list[dict] | None = [] if keep else None
        self._sha = hashlib.sha256()
        self.count = 0

    def append(self, tick: int, op: str, actor: int | None, args: dict, result: Any) -> None:
        rec = {"tick": tick, "op": op, "actor": actor, "args": args, "result": result}
        line = json.dumps(rec, separators=(",", ":"))
        self._sha.update(line.encode())
        self._sha.update(b"\n")
        if self._fh is not None:
            self._fh.write(line)
            self._fh.write("\n")
        if self.records is not None:
            self.records.append(rec)
        self.count += 1

    @property
    def digest(self) -> str:
        return self._sha.hexdigest()

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None


def read_event_log(path: str | Path) -> Iterable[dict]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                yield json.loads(line)


class World:
    """Complete platform state: accounts, follow edges, tweets, likes, clock."""

    def __init__(self, seed: int = 0, policy: FeedPolicy | None = None, log: EventLog | None = None):
        self.seed = seed
        self.rng = random.Random(seed)
        self.policy = policy or FeedPolicy()
        self.log = log
        self.clock = 0
        self.accounts: dict[int, Account] = {}
        self.tweets: list[Tweet] = []
        # insertion-ordered dicts double as chronological lists with O(1) removal
        self._friends: dict[int, dict[int, int]] = {}
        self._followers: dict[int, dict[int, int]] = {}
        self._timeline: dict[int, list[int]] = {}
        self._mentions: dict[int, list[int]] = {}
        self._liked: dict[int, list[int]] = {}
        self._likes: set[tuple[int, int]] = set()
        self._retweeted: set[tuple[int, int]] = set()
        self.like_counts: list[int] = []
        self._tag_index: dict[str, list[int]] = {}
        self._tag_hours: dict[int, Counter] = {}
        self._trend_cache: tuple[int, list[str], list[int]] | None = None
        self._next_account = 1
        self.observers: list[Callable[[str, "World", int, int], None]] = []
        self.meta: Any = None  # generator ground truth, when present

    # -- bookkeeping -----------------------------------------------------
    def _emit(self, op: str, actor: int | None, args: dict, result: Any) -> None:
        if self.log is not None:
            self.log.append(self.clock, op, actor, args, result)

    def advance(self, tick: int) -> None:
        if tick < self.clock:
            raise PlatformError(f"clock cannot move backwards ({tick} < {self.clock})")
        self.clock = tick

    def _require(self, account: int) -> None:
        if account not in self.accounts:
            raise PlatformError(f"unknown account {account}")

    def _require_tweet(self, tweet_id: int) -> Tweet:
        if not 0 <= tweet_id < len(self.tweets):
            raise PlatformError(f"unknown tweet {tweet_id}")
        return self.tweets[tweet_id]

    # -- mutations -------------------------------------------------------
    def create_account(
        self,
        *,
        id: int | None = None,
        automation_score: float = 0.0,
        alignment: float = 0.0,
        low_cred_propensity: float = 0.0,
        activity_rate: float = 0.0,
        language: str = "en",
        label: str = "",
    ) -> int:
        if not 0.0 <= automation_score <= 1.0:
            raise ValueError("automation_score must lie in [0, 1]")
        if not -1.0 <= alignment <= 1.0:
            raise ValueError("alignment must lie in [-1, 1]")
        if not 0.0 <= low_cred_propensity <= 1.0:
            raise ValueError("low_cred_propensity must lie in [0, 1]")
        if activity_rate < 0:
            raise ValueError("activity_rate must be non-negative")
        if id is None:
            id = self._next_account
        elif id in self.accounts:
            raise PlatformError(f"duplicate account id {id}")
        self._next_account = max(self._next_account, id + 1)
        acct = Account(id, self.clock, float(automation_score), float(alignment),
                       float(low_cred_propensity), float(activity_rate), language, label)
        self.accounts[id] = acct
        self._friends[id] = {}
        self._followers[id] = {}
        self._timeline[id] = []
        self._mentions[id] = []
        self._liked[id] = []
        if self.log is not None:
            args = asdict(acct)
            del args["id"], args["created_at"]
            self._emit("create_account", id, args, id)
        return id

    def follow(self, a: int, b: int) -> bool:
        self._require(a)
        self._require(b)
        if a == b:
            raise PlatformError("self-follow is not allowed")
        if b in self._friends[a]:
            self._emit("follow", a, {"friend": b}, False)
            return False
        self._friends[a][b] = self.clock
        self._followers[b][a] = self.clock
        self._emit("follow", a, {"friend": b}, True)
        for obs in self.observers:
            obs("follow", self, a, b)
        return True

    def unfollow(self, a: int, b: int) -> bool:
        self._require(a)
        self._require(b)
        if b not in self._friends[a]:
            self._emit("unfollow", a, {"friend": b}, False)
            return False
        del self._friends[a][b]
        del self._followers[b][a]
        self._emit("unfollow", a, {"friend": b}, True)
        return True

    def post_tweet(
        self,
        author: int,
        kind: str = "original",
        ref: int | None = None,
        hashtags: Iterable[str] = (),
        links: Iterable[str] = (),
        text: str = "",
        language: str | None = None,
        lean: float | None = None,
    ) -> int:
        self._require(author)
        if kind not in TWEET_KINDS:
            raise PlatformError(f"unknown tweet kind {kind!r}")
        acct = self.accounts[author]
        tags = tuple(normalize_hashtag(h) for h in hashtags)
        doms = tuple(normalize_domain(u) for u in links)
        if kind == "original":
            if ref is not None:
                raise PlatformError("original tweets carry no reference")
        else:
            if ref is None:
                raise PlatformError(f"{kind} requires a target tweet")
            target = self._require_tweet(ref)
            if kind == "retweet":
                if target.kind == "retweet":
                    ref, target = target.ref, self.tweets[target.ref]
                tags, doms, text = target.hashtags, target.links, target.text
                language = target.language
                lean = target.lean
        if lean is None:
            lean = acct.alignment
        tid = len(self.tweets)
        tw = Tweet(tid, author, self.clock, kind, ref, tags, doms, text,
                   language or acct.language, float(lean))
        self.tweets.append(tw)
        self.like_counts.append(0)
        self._timeline[author].append(tid)
        if kind == "retweet":
            self._retweeted.add((author, ref))
        elif tags:
            hour = self.clock // 60
            bucket = self._tag_hours.get(hour)
            if bucket is None:
                bucket = self._tag_hours[hour] = Counter()
            for t in set(tags):
                bucket[t] += 1
                self._tag_index.setdefault(t, []).append(tid)
        if kind == "reply":
            target_author = self.tweets[ref].author
            if target_author != author:
                self._mentions[target_author].append(tid)
        if self.log is not None:
            args = {"kind": kind, "ref": ref, "hashtags": list(tags), "links": list(doms),
                    "text": text, "language": tw.language, "lean": tw.lean}
            self._emit("post_tweet", author, args, tid)
        return tid

    def like(self, a: int, tweet_id: int) -> bool:
        self._require(a)
        self._require_tweet(tweet_id)
        if (a, tweet_id) in self._likes:
            self._emit("like", a, {"tweet": tweet_id}, False)
            return False
        self._likes.add((a, tweet_id))
        self._liked[a].append(tweet_id)
        self.like_counts[tweet_id] += 1
        self._emit("like", a, {"tweet": tweet_id}, True)
        return True

    def note(self, op: str, actor: int | None, args: dict, result: Any = None) -> None:
        """Log a non-mutating record (behavior skips, day boundaries)."""
        self._emit(op, actor, args, result)

    # -- read-only queries ----------------------------------------------
    def friend_count(self, a: int) -> int:
        return len(self._friends[a])

    def follower_count(self, a: int) -> int:
        return len(self._followers[a])

    def friends(self, a: int) -> dict[int, int]:
        """Chronological friend -> followed-at mapping (read-only by convention)."""
        return self._friends[a]

    def followers(self, a: int) -> dict[int, int]:
        return self._followers[a]

    def is_following(self, a: int, b: int) -> bool:
        return b in self._friends[a]

    def has_retweeted(self, a: int, tweet_id: int) -> bool:
        t = self.tweets[tweet_id]
        orig = t.ref if t.kind == "retweet" else tweet_id
        return (a, orig) in self._retweeted

    def friends_latest(self, a: int, n: int = 200) -> list[int]:
        self._require(a)
        return list(itertools.islice(reversed(self._friends[a]), n))

    def followers_latest(self, a: int, n: int = 200) -> list[int]:
        self._require(a)
        return list(itertools.islice(reversed(self._followers[a]), n))

    def friends_of_friend_latest(self, b: int, n: int = 5000) -> list[int]:
        return self.friends_latest(b, n)

    def user_timeline(self, a: int, n: int = 20) -> list[Tweet]:
        self._require(a)
        tl = self._timeline[a]
        return [self.tweets[i] for i in itertools.islice(reversed(tl), n)]

    def mention_timeline(self, a: int, n: int = 10, after: int = -1) -> list[Tweet]:
        self._require(a)
        out = []
        for tid in reversed(self._mentions[a]):
            if tid <= after or len(out) >= n:
                break
            out.append(self.tweets[tid])
        return out

    def likes_of(self, a: int, n: int = 3) -> list[Tweet]:
        self._require(a)
        return [self.tweets[i] for i in itertools.islice(reversed(self._liked[a]), n)]

    def friend_tweets(self, a: int, n: int) -> list[Tweet]:
        """The ``n`` most recent tweets authored or retweeted by ``a``'s friends."""
        self._require(a)
        tls = [reversed(self._timeline[f]) for f in self._friends[a] if self._timeline[f]]
        merged = heapq.merge(*tls, reverse=True)
        return [self.tweets[i] for i in itertools.islice(merged, n)]

    def curate_home_timeline(self, viewer: int, n: int, rng: random.Random | None = None) -> list[Tweet]:
        policy = self.policy
        if policy.kind == "chronological" or policy.bias_strength == 0.0:
            return self.friend_tweets(viewer, n)
        pool = self.friend_tweets(viewer, BIASED_POOL_FACTOR * n)
        if len(pool) <= n:
            return pool
        rng = rng or self.rng
        delta = policy.bias_strength
        # Efraimidis-Spirakis keys: top-n of log(u)/w is weighted sampling without replacement
        keyed = []
        for tw in pool:
            u = rng.random()
            while u == 0.0:
                u = rng.random()
            keyed.append((math.log(u) / math.exp(delta * tw.lean), tw.id))
        chosen = heapq.nlargest(n, keyed)
        return [self.tweets[i] for i in sorted((tid for _, tid in chosen), reverse=True)]

    def _trend_counts(self) -> tuple[list[str], list[int]]:
        hour = self.clock // 60
        if self._trend_cache is not None and self._trend_cache[0] == hour:
            return self._trend_cache[1], self._trend_cache[2]
        total: Counter = Counter()
        for h in range(hour - TREND_WINDOW // 60 + 1, hour + 1):
            bucket = self._tag_hours.get(h)
            if bucket:
                total.update(bucket)
        tags = sorted(total)
        counts = [total[t] for t in tags]
        self._trend_cache = (hour, tags, counts)
        return tags, counts

    def trend_topics(self, k: int = 3, rng: random.Random | None = None) -> list[str]:
        """Sample ``k`` hashtags without replacement, weighted by 24h frequency."""
        rng = rng or self.rng
        tags, counts = self._trend_counts()
        tags, counts = list(tags), list(counts)
        chosen = []
        while tags and len(chosen) < k:
            i = _weighted_index(rng, counts)
            chosen.append(tags.pop(i))
            counts.pop(i)
        return chosen

    def top_tweets(self, tag: str, k: int = 5) -> list[Tweet]:
        """Most-liked tweets carrying ``tag`` in the trailing 24h (ties: newest)."""
        horizon = self.clock - TREND_WINDOW
        cand = []
        for tid in reversed(self._tag_index.get(tag, ())):
            if self.tweets[tid].created_at <= horizon:
                break
            cand.append((self.like_counts[tid], tid))
        return [self.tweets[tid] for _, tid in heapq.nlargest(k, cand)]

    def trends(self, k: int = 3, top: int = 5, rng: random.Random | None = None) -> list[tuple[str, list[Tweet]]]:
        return [(t, self.top_tweets(t, top)) for t in self.trend_topics(k, rng)]

    def query(self, kind: str, account: int | None = None, n: int | None = None, **kw):
        """Unified fetch used by the behavior engine."""
        if kind == "user_timeline":
            return self.user_timeline(account, 20 if n is None else n)
        if kind == "mention_timeline":
            return self.mention_timeline(account, 10 if n is None else n, **kw)
        if kind == "friends_latest":
            return self.friends_latest(account, 200 if n is None else n)
        if kind == "followers_latest":
            return self.followers_latest(account, 200 if n is None else n)
        if kind == "friends_of_friend_latest":
            return self.friends_of_friend_latest(account, 5000 if n is None else n)
        if kind == "likes_of":
            return self.likes_of(account, 3 if n is None else n)
        if kind == "home_timeline":
            return self.curate_home_timeline(account, 15 if n is None else n, **kw)
        if kind == "trends":
            return self.trends(**kw)
        raise PlatformError(f"unknown query {kind!r}")

    # -- snapshot -------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "format": SNAPSHOT_FORMAT,
            "version": SNAPSHOT_VERSION,
            "seed": self.seed,
            "clock": self.clock,
            "policy": {"kind": self.policy.kind, "bias_strength": self.policy.bias_strength},
            "rng_state": _rng_state_to_json(self.rng.getstate()),
            "next_account": self._next_account,
            "accounts": [asdict(a) for a in self.accounts.values()],
            "friends": {str(a): [[b, t] for b, t in fr.items()] for a, fr in self._friends.items()},
            "followers": {str(b): [[a, t] for a, t in fo.items()] for b, fo in self._followers.items()},
            "tweets": [
                [t.id, t.author, t.created_at, t.kind, t.ref, list(t.hashtags), list(t.links),
                 t.text, t.language, t.lean]
                for t in self.tweets
            ],
            "likes": {str(a): lst for a, lst in self._liked.items() if lst},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "World":
        if data.get("format") != SNAPSHOT_FORMAT:
            raise PlatformError("not a world snapshot")
        if data.get("version") != SNAPSHOT_VERSION:
            raise PlatformError(f"unsupported snapshot version {data.get('version')}")
        w = cls(seed=data["seed"], policy=FeedPolicy(**data["policy"]))
        w.rng.setstate(_rng_state_from_json(data["rng_state"]))
        for a in data["accounts"]:
            acct = Account(**a)
            w.accounts[acct.id] = acct
            w._friends[acct.id], w._followers[acct.id] = {}, {}
            w._timeline[acct.id], w._mentions[acct.id], w._liked[acct.id] = [], [], []
        for a, fr in data["friends"].items():
            for b, t in fr:
                w._friends[int(a)][b] = t
        for b, fo in data["followers"].items():
            for a, t in fo:
                w._followers[int(b)][a] = t
        for row in data["tweets"]:
            tid, author, created, kind, ref, tags, links, text, lang, lean = row
            w.clock = created
            t = Tweet(tid, author, created, kind, ref, tuple(tags), tuple(links), text, lang, lean)
            w.tweets.append(t)
            w.like_counts.append(0)
            w._timeline[author].append(tid)
            if kind == "retweet":
                w._retweeted.add((author, ref))
            elif tags:
                bucket = w._tag_hours.setdefault(created // 60, Counter())
                for tag in set(tags):
                    bucket[tag] += 1
                    w._tag_index.setdefault(tag, []).append(tid)
            if kind == "reply" and w.tweets[ref].author != author:
                w._mentions[w.tweets[ref].author].append(tid)
        for a, lst in data["likes"].items():
            for tid in lst:
                w._likes.add((int(a), tid))
                w._liked[int(a)].append(tid)
                w.like_counts[tid] += 1
        w.clock = data["clock"]
        w._next_account = data["next_account"]
        return w

    def save_snapshot(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), separators=(",", ":")))

    @classmethod
    def load_snapshot(cls, path: str | Path) -> "World":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def check_integrity(self) -> None:
        """Raise AssertionError if any cross-reference fails to resolve."""
        for a, fr in self._friends.items():
            assert a in self.accounts
            for b in fr:
                assert b in self.accounts and a in self._followers[b] and a != b
        for b, fo in self._followers.items():
            for a in fo:
                assert b in self._friends[a]
        for t in self.tweets:
            assert t.author in self.accounts
            if t.ref is not None:
                assert 0 <= t.ref < t.id
        for a, tid in self._likes:
            assert a in self.accounts and 0 <= tid < len(self.tweets)


def replay_event(world: World, rec: dict) -> None:
    """Apply one logged mutation to ``world``; checks the recorded result."""
    op = rec["op"]
    world.advance(rec["tick"])
    actor, args = rec["actor"], rec["args"]
    if op == "create_account":
        got = world.create_account(id=actor, **args)
    elif op == "follow":
        got = world.follow(actor, args["friend"])
    elif op == "unfollow":
        got = world.unfollow(actor, args["friend"])
    elif op == "post_tweet":
        got = world.post_tweet(actor, args["kind"], args["ref"], args["hashtags"], args["links"],
                               args["text"], args["language"], args["lean"])
    elif op == "like":
        got = world.like(actor, args["tweet"])
    else:
        return
    if got != rec["result"]:
        raise PlatformError(f"replay diverged at {rec}: got {got!r}")


def _weighted_index(rng: random.Random, weights: list[float]) -> int:
    total = sum(weights)
    x = rng.random() * total
    acc = 0.0
    for i, w in enumerate(weights):
        acc += w
        if x < acc:
            return i
    return len(weights) - 1


def _rng_state_to_json(state) -> list:
    version, internal, gauss = state
    return [version, list(internal), gauss]


def _rng_state_from_json(data) -> tuple:
    version, internal, gauss = data
    return (version, tuple(internal), gauss)
