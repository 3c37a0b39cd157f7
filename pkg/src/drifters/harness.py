"""Experiment orchestration: world, drifters, daily observations and reports.

A run generates a world, lets background activity warm up, trains the
alignment models, deploys five groups of drifters anchored on the five seed
accounts and then simulates one day at a time. Each day ends with an
observation of every drifter at the last minute of the day. The event log
records every mutation plus the home-timeline window each observation used,
so all reports can be rebuilt from the log alone.
"""
from __future__ import annotations

import csv
import hashlib
import heapq
import itertools
import json
import math
import random
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from drifters import __version__
from drifters.alignment import (
    FRIENDS_WINDOW,
    HOME_WINDOW,
    METHODS,
    USER_WINDOW,
    AlignmentModels,
    AxisModel,
    Calibration,
    DomainScores,
    HashtagVectors,
    calibrate,
    calibrated_mean,
    forward_fill,
    newsfeed_bias_test,
    train_hashtag_vectors,
)
from drifters.analytics import (
    BotExposure,
    DailyObservation,
    LowCredList,
    bonferroni,
    bot_exposure,
    confounder_correlations,
    followback_overlap,
    group_bot_exposure,
    growth_rate_tests,
    lowcred_exposure_of,
    ttest_two_sample,
)
from drifters.behavior import (
    GROUPS,
    BehaviorConfig,
    DrifterState,
    PhraseBook,
    drifter_step,
    initialize_drifter,
)
from drifters.echo import EgoMetrics, ego_metrics, sample_ego_network
from drifters.platform import MINUTES_PER_DAY, EventLog, FeedPolicy, World, read_event_log, replay_event
from drifters.stats import TestResult, mean_se
from drifters.worldgen import (
    SCENARIOS,
    ConfigError,
    Population,
    SeedAccountSpec,
    background_events,
    background_step,
    execute_background,
    generate_world,
    hashtag_corpus,
    scenario_config,
)

MANIFEST_FORMAT = "drifters.manifest"
REPORT_FILES = (
    "observations.csv", "followers.csv", "followers_groups.csv", "alignment.csv",
    "alignment_groups.csv", "echo.csv", "bot_scores.csv", "bot_groups.csv", "lowcred.csv",
    "followback.csv", "bias_tests.csv", "group_tests.csv", "confounders.csv",
    "summary.json", "summary.txt",
)
MODEL_FILES = ("vectors.txt", "domain_scores.tsv", "lowcred.txt")

# substream keys under the master seed
_WORLD, _DRIFTER, _METRICS, _ECHO, _EMBED, _GEN = range(6)


class HarnessError(RuntimeError):
    pass


def substream_seed(master: int, *key: int) -> int:
    """64-bit seed for the named substream; independent of every other key."""
    ss = np.random.SeedSequence(entropy=master, spawn_key=tuple(key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass
class ExperimentConfig:
    scenario: str = "paper-like"
    n_agents: int = 2000
    world_overrides: dict[str, Any] = field(default_factory=dict)
    behavior: BehaviorConfig = field(default_factory=BehaviorConfig)
    n_groups: int = 5
    drifters_per_group: int = 3
    duration_days: int = 144
    warmup_days: int = 2
    feed: str = "chronological"
    bias_strength: float = 0.0
    seed: int = 0
    corpus_sentences: int = 20000
    embedding_dim: int = 32
    embedding_epochs: int = 5
    calibration_tweets: int = 200
    echo_shuffles: int = 30
    lowcred_excluded_seeds: tuple[str, ...] = ("Right",)
    log_events: bool = True

    def __post_init__(self):
        if isinstance(self.behavior, dict):
            self.behavior = BehaviorConfig(**self.behavior)
        self.lowcred_excluded_seeds = tuple(self.lowcred_excluded_seeds)
        if self.duration_days < 1:
            raise ConfigError("duration_days must be at least 1")
        if self.warmup_days < 0:
            raise ConfigError("warmup_days must be non-negative")
        if self.n_groups != len(GROUPS):
            raise ConfigError(f"n_groups must be {len(GROUPS)}")
        if self.drifters_per_group < 1:
            raise ConfigError("drifters_per_group must be positive")
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose from {SCENARIOS}")
        FeedPolicy(self.feed, self.bias_strength)  # validates

    def world_config(self):
        return scenario_config(self.scenario, self.n_agents, **self.world_overrides)

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["behavior"] = asdict(self.behavior)
        d["behavior"]["target_rate"] = list(self.behavior.target_rate)
        d["lowcred_excluded_seeds"] = list(self.lowcred_excluded_seeds)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class DrifterInfo:
    account: int
    group: str
    seed_account: int
    index: int


@dataclass
class DrifterFinal:
    echo: EgoMetrics
    bots: BotExposure
    overlap: float | None
    friends: int
    followers: int


@dataclass
class RunResult:
    config: ExperimentConfig
    drifters: list[DrifterInfo]
    observations: list[DailyObservation]
    final: dict[int, DrifterFinal]
    calibration: Calibration
    start_tick: int
    end_tick: int
    world: World | None = None
    models: AlignmentModels | None = None
    lowcred: LowCredList | None = None
    event_digest: str | None = None


# -- setup helpers -------------------------------------------------------------------------
def build_lowcred_list(pop: Population, excluded_seeds: Sequence[str]) -> LowCredList:
    domains = {d: "synthetic-left" for d in pop.vocab.left_lowcred}
    domains.update({d: "synthetic-right" for d in pop.vocab.right_lowcred})
    excluded = set()
    for label in excluded_seeds:
        dom = pop.vocab.seed_domains[label]
        domains[dom] = "seed-source"
        excluded.add(dom)
    return LowCredList(domains, excluded)


def build_models(world: World, config: ExperimentConfig) -> AlignmentModels:
    pop: Population = world.meta
    corpus = hashtag_corpus(world, config.corpus_sentences, substream_seed(config.seed, _EMBED))
    vectors = train_hashtag_vectors(corpus, dim=config.embedding_dim, epochs=config.embedding_epochs,
                                    seed=substream_seed(config.seed, _EMBED, 1))
    models = AlignmentModels(AxisModel(vectors), DomainScores(dict(pop.vocab.domain_scores)))
    center = pop.seeds["Center"]
    ref = world.user_timeline(center, config.calibration_tweets)
    models.calibration = calibrate(models, ref, reference=f"account {center}, {len(ref)} tweets")
    return models


def observe(world: World, info: DrifterInfo, day: int, home: Sequence, models: AlignmentModels,
            lowcred: LowCredList, actions: int) -> DailyObservation:
    """Daily record for one drifter; a pure function of the world state and the home window."""
    me = info.account
    user = world.user_timeline(me, USER_WINDOW)
    friends = world.friend_tweets(me, FRIENDS_WINDOW)
    s_h, s_u, s_f = {}, {}, {}
    for m in METHODS:
        s_h[m] = calibrated_mean(home, m, models)[0]
        s_u[m] = calibrated_mean(user, m, models)[0]
        s_f[m] = calibrated_mean(friends, m, models)[0]
    exp = lowcred_exposure_of(home, lowcred)
    return DailyObservation(me, info.group, day, world.follower_count(me), world.friend_count(me),
                           s_h, s_u, s_f, exp.share, actions,
                           (exp.flagged_links, exp.links, exp.flagged_tweets, exp.tweets, exp.tweets_with_links))


def final_metrics(world: World, drifters: Sequence[DrifterInfo], config: ExperimentConfig) -> dict[int, DrifterFinal]:
    out = {}
    for info in drifters:
        rng = random.Random(substream_seed(config.seed, _ECHO, info.index))
        sample = sample_ego_network(world, info.account, rng)
        out[info.account] = DrifterFinal(
            echo=ego_metrics(sample, config.echo_shuffles, rng),
            bots=bot_exposure(world, info.account),
            overlap=followback_overlap(world, info.account),
            friends=world.friend_count(info.account),
            followers=world.follower_count(info.account),
        )
    return out


# -- the run ------------------------------------------------------------------------------
def run_experiment(config: ExperimentConfig, out_dir: str | Path | None = None,
                   keep_world: bool = False) -> tuple["RunManifest", RunResult]:
    """Simulate the full protocol; writes artifacts and a manifest when ``out_dir`` is given."""
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    log = None
    if config.log_events:
        log = EventLog(out / "events.jsonl" if out is not None else None)
    policy = FeedPolicy(config.feed, config.bias_strength)
    world = World(seed=substream_seed(config.seed, _WORLD), policy=policy, log=log)
    manifest = RunManifest.start(config)
    day = -1
    try:
        generate_world(config.world_config(), substream_seed(config.seed, _GEN), world)
        pop: Population = world.meta
        background_step(world, config.warmup_days * MINUTES_PER_DAY)
        start = config.warmup_days * MINUTES_PER_DAY
        world.advance(start)
        models = build_models(world, config)
        lowcred = build_lowcred_list(pop, config.lowcred_excluded_seeds)

        bcfg = config.behavior
        phrases = PhraseBook()
        drifters: list[DrifterInfo] = []
        states: list[DrifterState] = []
        for g, group in enumerate(GROUPS):
            seed_acct = pop.seeds[group]
            for k in range(config.drifters_per_group):
                idx = g * config.drifters_per_group + k
                rng = random.Random(substream_seed(config.seed, _DRIFTER, idx))
                st = initialize_drifter(world, seed_acct, rng, bcfg, group, start=start)
                pop.drifters.add(st.account)
                states.append(st)
                drifters.append(DrifterInfo(st.account, group, seed_acct, idx))
        manifest.record_setup(models.calibration, drifters, start)
        world.note("deploy", None, {"drifters": [asdict(d) for d in drifters]})

        observations: list[DailyObservation] = []
        for day in range(config.duration_days):
            day_start = start + day * MINUTES_PER_DAY
            day_end = day_start + MINUTES_PER_DAY
            actions = _simulate_day(world, states, bcfg, phrases, day_start, day_end)
            world.advance(day_end - 1)
            for info, st in zip(drifters, states):
                rng = random.Random(substream_seed(config.seed, _METRICS, day, info.index))
                home = world.curate_home_timeline(info.account, HOME_WINDOW, rng=rng)
                world.note("observe", info.account, {"day": day, "home": [t.id for t in home],
                                                      "actions": actions[info.account]})
                observations.append(observe(world, info, day, home, models, lowcred, actions[info.account]))
            world.note("day_end", None, {"day": day})
            manifest.last_completed_day = day
        end_tick = world.clock
        final = final_metrics(world, drifters, config)
    except Exception as exc:
        manifest.status = "failed"
        manifest.error = f"{type(exc).__name__}: {exc}"
        if log is not None:
            log.close()
        if out is not None:
            manifest.save(out / "manifest.json")
        raise
    if log is not None:
        log.close()
    result = RunResult(config, drifters, observations, final, models.calibration, start, end_tick,
                       world if keep_world else None, models, lowcred,
                       log.digest if log is not None else None)
    manifest.end_tick = end_tick
    manifest.status = "complete"
    manifest.event_digest = result.event_digest
    if out is not None:
        models.vectors.save(out / "vectors.txt")
        models.domains.save(out / "domain_scores.tsv")
        lowcred.save(out / "lowcred.txt")
        emit_reports(result, out)
        manifest.artifacts = hash_artifacts(out, REPORT_FILES + MODEL_FILES
                                            + (("events.jsonl",) if config.log_events else ()))
        manifest.save(out / "manifest.json")
    return manifest, result


def _simulate_day(world: World, states: list[DrifterState], bcfg: BehaviorConfig, phrases: PhraseBook,
                  day_start: int, day_end: int) -> dict[int, int]:
    """Interleave background events and drifter wakes; background wins ties at equal ticks."""
    plan = background_events(world, day_start, day_end - day_start)
    wakes = [(st.next_wake, i) for i, st in enumerate(states)]
    heapq.heapify(wakes)
    actions = {st.account: 0 for st in states}
    p = 0
    while wakes and wakes[0][0] < day_end:
        wake, i = heapq.heappop(wakes)
        tick = int(wake)
        while p < len(plan) and plan[p][0] <= tick:
            t, agent, kind = plan[p]
            world.advance(max(world.clock, t))
            execute_background(world, agent, kind)
            p += 1
        st = states[i]
        drifter_step(world, st, bcfg, phrases)
        actions[st.account] += 1
        heapq.heappush(wakes, (st.next_wake, i))
    for t, agent, kind in plan[p:]:
        world.advance(max(world.clock, t))
        execute_background(world, agent, kind)
    return actions


# -- manifest ------------------------------------------------------------------------
@dataclass
class RunManifest:
    config: dict
    config_hash: str
    code_version: str
    master_seed: int
    calibration: dict = field(default_factory=dict)
    drifter_seeds: dict = field(default_factory=dict)
    start_tick: int | None = None
    end_tick: int | None = None
    last_completed_day: int = -1
    status: str = "running"
    error: str = ""
    event_digest: str | None = None
    artifacts: dict[str, str] = field(default_factory=dict)

    @classmethod
    def start(cls, config: ExperimentConfig) -> "RunManifest":
        return cls(config.to_dict(), config.digest(), __version__, config.seed)

    def record_setup(self, calibration: Calibration, drifters: Sequence[DrifterInfo], start: int) -> None:
        self.calibration = asdict(calibration)
        self.start_tick = start
        self.drifter_seeds = {
            str(d.account): {"group": d.group, "seed_account": d.seed_account, "index": d.index,
                             "substream": [self.master_seed, _DRIFTER, d.index]}
            for d in drifters
        }

    def to_dict(self) -> dict:
        return {"format": MANIFEST_FORMAT, **asdict(self)}

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "RunManifest":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if data.pop("format", None) != MANIFEST_FORMAT:
            raise HarnessError(f"{path} is not a run manifest")
        return cls(**data)

    def experiment_config(self) -> ExperimentConfig:
        return ExperimentConfig.from_dict(self.config)


def file_sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def hash_artifacts(out: Path, names: Sequence[str]) -> dict[str, str]:
    return {n: file_sha256(out / n) for n in names}


# -- reports ------------------------------------------------------------------------------
def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ""
    return str(v)


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(x) for x in r])


def _test_cols(res: TestResult | None) -> list:
    if res is None:
        return [None] * 7
    return [res.method, res.statistic, res.df, res.p, res.effect, "/".join(map(str, res.n)), res.degenerate]


TEST_HEADER = ("method", "statistic", "df", "p", "effect", "n", "degenerate")


def bias_tests(result: RunResult) -> list[dict]:
    """Paired s_h vs s_f test per group and method over all drifter-days with both values."""
    rows = []
    for group in GROUPS:
        obs = [o for o in result.observations if o.group == group]
        for m in METHODS:
            sh = [o.s_h[m] for o in obs]
            sf = [o.s_f[m] for o in obs]
            pairs = [(h, f) for h, f in zip(sh, sf) if h is not None and f is not None]
            res = newsfeed_bias_test(sh, sf) if len(pairs) >= 2 else None
            mean_bias = math.fsum(h - f for h, f in pairs) / len(pairs) if pairs else None
            rows.append({"group": group, "method": m, "mean_bias": mean_bias, "result": res})
    return rows


def pooled_bias_test(result: RunResult, method: str) -> TestResult:
    """Paired s_h vs s_f test over every drifter-day of the run."""
    sh = [o.s_h[method] for o in result.observations]
    sf = [o.s_f[method] for o in result.observations]
    return newsfeed_bias_test(sh, sf)


def drifter_summary(result: RunResult) -> dict[int, dict[str, float | None]]:
    """Per-drifter scalar metrics used by the group comparisons."""
    by: dict[int, list[DailyObservation]] = {}
    for o in result.observations:
        by.setdefault(o.drifter, []).append(o)
    out = {}
    for info in result.drifters:
        obs = sorted(by.get(info.account, []), key=lambda o: o.day)
        fin = result.final[info.account]
        shares = [o.lowcred_share for o in obs if o.lowcred_share is not None]
        slope = None
        if len(obs) >= 2:
            t = np.array([o.day for o in obs], float)
            y = np.array([o.followers for o in obs], float)
            dt = t - t.mean()
            slope = float(dt @ (y - y.mean()) / (dt @ dt))
        out[info.account] = {
            "growth_slope": slope,
            "density": fin.echo.density,
            "transitivity": fin.echo.transitivity,
            "normalized_transitivity": fin.echo.normalized_transitivity,
            "lowcred": math.fsum(shares) / len(shares) if shares else None,
            "overlap": fin.overlap,
            "friend_bot": fin.bots.friend_mean,
            "follower_bot": fin.bots.follower_mean,
        }
    return out


# follower slopes are compared by growth_rate_tests; listed here for the group means only
GROUP_METRICS = ("growth_slope", "density", "transitivity", "normalized_transitivity",
                 "lowcred", "overlap", "friend_bot", "follower_bot")


def group_tests(result: RunResult) -> list[dict]:
    """Pairwise group comparisons; per-drifter metrics plus the three growth estimators.

    Bonferroni correction is applied over the whole family of rows.
    """
    per = drifter_summary(result)
    groups = {g: [d.account for d in result.drifters if d.group == g] for g in GROUPS}
    rows = []
    for a, b in itertools.combinations(GROUPS, 2):
        try:
            growth = growth_rate_tests(result.observations, a, b)
        except ValueError:
            growth = {}
        for name, res in growth.items():
            rows.append({"metric": f"followers_{name}", "group_a": a, "group_b": b, "result": res})
        for metric in GROUP_METRICS[1:]:
            x = [per[d][metric] for d in groups[a] if per[d][metric] is not None]
            y = [per[d][metric] for d in groups[b] if per[d][metric] is not None]
            res = ttest_two_sample(x, y) if len(x) >= 2 and len(y) >= 2 else None
            rows.append({"metric": metric, "group_a": a, "group_b": b, "result": res})
    m = sum(1 for r in rows if r["result"] is not None)
    for r in rows:
        r["p_bonferroni"] = bonferroni(r["result"].p, m) if r["result"] is not None else None
    return rows


def group_means(result: RunResult) -> dict[str, dict[str, tuple[float | None, float | None]]]:
    per = drifter_summary(result)
    out = {}
    for g in GROUPS:
        accts = [d.account for d in result.drifters if d.group == g]
        out[g] = {}
        for metric in GROUP_METRICS:
            vals = [per[a][metric] for a in accts if per[a][metric] is not None]
            out[g][metric] = mean_se(vals) if vals else (None, None)
    return out


def emit_reports(result: RunResult, out_dir: str | Path) -> list[Path]:
    """Write every figure-equivalent dataset plus the test tables and summaries."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    obs = sorted(result.observations, key=lambda o: (o.day, o.drifter))
    groups_of = {d.account: d.group for d in result.drifters}

    hdr = ["day", "drifter", "group", "followers", "friends"]
    for m in METHODS:
        hdr += [f"s_h_{m}", f"s_u_{m}", f"s_f_{m}"]
    hdr += ["lowcred_share", "actions_today"]
    rows = []
    for o in obs:
        r = [o.day, o.drifter, o.group, o.followers, o.friends]
        for m in METHODS:
            r += [o.s_h[m], o.s_u[m], o.s_f[m]]
        rows.append(r + [o.lowcred_share, o.actions_today])
    _write_csv(out / "observations.csv", hdr, rows)

    _write_csv(out / "followers.csv", ["day", "drifter", "group", "followers"],
               ([o.day, o.drifter, o.group, o.followers] for o in obs))
    days = sorted({o.day for o in obs})
    grows = []
    for day in days:
        for g in GROUPS:
            vals = [o.followers for o in obs if o.day == day and o.group == g]
            if vals:
                mu, se = mean_se(vals)
                grows.append([day, g, mu, se, len(vals)])
    _write_csv(out / "followers_groups.csv", ["day", "group", "mean", "se", "n"], grows)

    # alignment time series with forward fill per drifter and method
    filled: dict[tuple[int, str], dict[str, list]] = {}
    for d in result.drifters:
        series = sorted((o for o in obs if o.drifter == d.account), key=lambda o: o.day)
        for m in METHODS:
            filled[(d.account, m)] = {
                "day": [o.day for o in series],
                "s_h": forward_fill([o.s_h[m] for o in series]),
                "s_u": forward_fill([o.s_u[m] for o in series]),
                "s_f": forward_fill([o.s_f[m] for o in series]),
            }
    arows = []
    for (acct, m), s in sorted(filled.items()):
        for i, day in enumerate(s["day"]):
            h, u, f = s["s_h"][i], s["s_u"][i], s["s_f"][i]
            arows.append([day, acct, groups_of[acct], m, h, u, f, None if h is None or f is None else h - f])
    _write_csv(out / "alignment.csv", ["day", "drifter", "group", "method", "s_h", "s_u", "s_f", "bias"], arows)
    agrows = []
    for day in days:
        for g in GROUPS:
            for m in METHODS:
                sel = [r for r in arows if r[0] == day and r[2] == g and r[3] == m]
                cols = []
                for j in (4, 5, 7):
                    vals = [r[j] for r in sel if r[j] is not None]
                    cols.append(math.fsum(vals) / len(vals) if vals else None)
                if sel:
                    agrows.append([day, g, m] + cols)
    _write_csv(out / "alignment_groups.csv", ["day", "group", "method", "s_h", "s_u", "bias"], agrows)

    erows = []
    for d in result.drifters:
        e = result.final[d.account].echo
        erows.append([d.account, d.group, e.density, e.transitivity, e.normalized_transitivity,
                      e.null_transitivity, e.n_nodes, e.n_edges, e.max_degree_deviation, e.flag])
    _write_csv(out / "echo.csv", ["drifter", "group", "density", "transitivity", "normalized_transitivity",
                                  "null_transitivity", "n_nodes", "n_edges", "max_degree_deviation", "flag"], erows)

    brows = []
    for d in result.drifters:
        b = result.final[d.account].bots
        brows += [[d.account, d.group, "friend", s] for s in b.friend_scores]
        brows += [[d.account, d.group, "follower", s] for s in b.follower_scores]
    _write_csv(out / "bot_scores.csv", ["drifter", "group", "side", "score"], brows)
    bg = []
    for g in GROUPS:
        pooled = group_bot_exposure(result.final[d.account].bots for d in result.drifters if d.group == g)
        bg.append([g, pooled.friend_mean, len(pooled.friend_scores), pooled.follower_mean, len(pooled.follower_scores)])
    _write_csv(out / "bot_groups.csv", ["group", "friend_mean", "n_friends", "follower_mean", "n_followers"], bg)

    lrows = []
    for d in result.drifters:
        sel = [o for o in obs if o.drifter == d.account]
        shares = [o.lowcred_share for o in sel if o.lowcred_share is not None]
        tot = [sum(c) for c in zip(*(o.lowcred_counts for o in sel))] if sel else [0] * 5
        fl, nl, ft, nt, nwl = tot
        lrows.append([d.account, d.group, math.fsum(shares) / len(shares) if shares else None, len(shares),
                      fl / nl if nl else None, ft / nt if nt else None, ft / nwl if nwl else None])
    _write_csv(out / "lowcred.csv", ["drifter", "group", "mean_daily_share", "days", "pooled_link_share",
                                     "tweet_share", "linked_tweet_share"], lrows)

    frows = [[d.account, d.group, result.final[d.account].friends, result.final[d.account].followers,
              result.final[d.account].overlap] for d in result.drifters]
    _write_csv(out / "followback.csv", ["drifter", "group", "friends", "followers", "overlap"], frows)

    btests = bias_tests(result)
    _write_csv(out / "bias_tests.csv", ["group", "method", "mean_bias", *TEST_HEADER],
               ([r["group"], r["method"], r["mean_bias"], *_test_cols(r["result"])] for r in btests))

    gtests = group_tests(result)
    _write_csv(out / "group_tests.csv", ["metric", "group_a", "group_b", *TEST_HEADER, "p_bonferroni"],
               ([r["metric"], r["group_a"], r["group_b"], *_test_cols(r["result"]), r["p_bonferroni"]]
                for r in gtests))

    conf = confounders(result)
    _write_csv(out / "confounders.csv", ["against", *TEST_HEADER],
               ([name, *_test_cols(res)] for name, res in conf))

    summary = {
        "config_hash": result.config.digest(),
        "scenario": result.config.scenario,
        "seed": result.config.seed,
        "duration_days": result.config.duration_days,
        "calibration": asdict(result.calibration),
        "group_means": group_means(result),
        "pooled_bias": {m: _test_dict(_safe(pooled_bias_test, result, m)) for m in METHODS},
        "bias_tests": [{"group": r["group"], "method": r["method"], "mean_bias": r["mean_bias"],
                        **_test_dict(r["result"])} for r in btests],
        "group_tests": [{"metric": r["metric"], "group_a": r["group_a"], "group_b": r["group_b"],
                         "p_bonferroni": r["p_bonferroni"], **_test_dict(r["result"])} for r in gtests],
        "confounders": {name: _test_dict(res) for name, res in conf},
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (out / "summary.txt").write_text(_summary_text(summary), encoding="utf-8")
    return [out / n for n in REPORT_FILES]


def _safe(fn, *args):
    try:
        return fn(*args)
    except ValueError:
        return None


def _test_dict(res: TestResult | None) -> dict:
    if res is None:
        return {"result": None}
    d = res.as_row()
    d["test"] = d.pop("method")
    return {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in d.items()}


def confounders(result: RunResult) -> list[tuple[str, TestResult | None]]:
    specs = {s.label: s for s in result.config.world_config().seeds}
    followers = [float(result.final[d.account].followers) for d in result.drifters]
    seeds: list[SeedAccountSpec] = [specs[d.group] for d in result.drifters]
    try:
        total, within = confounder_correlations(followers, seeds)
    except ValueError:
        total = within = None
    return [("seed_popularity", total), ("seed_within_group_popularity", within)]


def _summary_text(summary: dict) -> str:
    lines = [f"scenario {summary['scenario']}  seed {summary['seed']}  days {summary['duration_days']}",
             f"config {summary['config_hash']}", "", "group means (mean, se)"]
    for g, metrics in summary["group_means"].items():
        cells = "  ".join(f"{k}={_num(v[0])}" for k, v in metrics.items())
        lines.append(f"  {g:7s} {cells}")
    lines += ["", "news-feed bias (paired s_h vs s_f)"]
    for m, t in summary["pooled_bias"].items():
        lines.append(f"  all     {m:8s} {_test_line(t)}")
    for r in summary["bias_tests"]:
        lines.append(f"  {r['group']:7s} {r['method']:8s} {_test_line(r)}")
    lines += ["", "group comparisons"]
    for r in summary["group_tests"]:
        lines.append(f"  {r['metric']:24s} {r['group_a']:6s} vs {r['group_b']:6s} {_test_line(r)} "
                     f"p_bonf={_num(r['p_bonferroni'])}")
    lines += ["", "confounders"]
    for name, t in summary["confounders"].items():
        lines.append(f"  {name:30s} {_test_line(t)}")
    return "\n".join(lines) + "\n"


def _num(v) -> str:
    return "NA" if v is None else f"{v:.4g}"


def _test_line(t: dict) -> str:
    if t.get("statistic") is None:
        return "n/a"
    flag = " degenerate" if t.get("degenerate") else ""
    return f"stat={_num(t['statistic'])} df={_num(t['df'])} p={_num(t['p'])} effect={_num(t['effect'])}{flag}"


# -- analysis from a log, replay ---------------------------------------------------------
def analyze_log(run_dir: str | Path, out_dir: str | Path | None = None) -> RunResult:
    """Rebuild observations and final metrics from ``events.jsonl`` and the saved models."""
    run = Path(run_dir)
    manifest = RunManifest.load(run / "manifest.json")
    config = manifest.experiment_config()
    log_path = run / "events.jsonl"
    if not log_path.exists():
        raise HarnessError(f"{log_path} not found; the run was made without an event log")
    models = AlignmentModels(AxisModel(HashtagVectors.load(run / "vectors.txt")),
                             DomainScores.load(run / "domain_scores.tsv"),
                             Calibration(**manifest.calibration))
    lowcred = LowCredList.load(run / "lowcred.txt")
    world = World(seed=0, policy=FeedPolicy(config.feed, config.bias_strength))
    drifters: list[DrifterInfo] = []
    info_of: dict[int, DrifterInfo] = {}
    observations: list[DailyObservation] = []
    seen_days: list[int] = []
    for rec in read_event_log(log_path):
        op = rec["op"]
        if op == "deploy":
            drifters = [DrifterInfo(**d) for d in rec["args"]["drifters"]]
            info_of = {d.account: d for d in drifters}
        elif op == "observe":
            world.advance(rec["tick"])
            a = rec["args"]
            home = [world.tweets[i] for i in a["home"]]
            observations.append(observe(world, info_of[rec["actor"]], a["day"], home, models, lowcred, a["actions"]))
        elif op == "day_end":
            seen_days.append(rec["args"]["day"])
        else:
            replay_event(world, rec)
    missing = sorted(set(range(config.duration_days)) - set(seen_days))
    if missing:
        raise HarnessError(f"event log is missing days {_ranges(missing)} of {config.duration_days}")
    obs_days = {o.day for o in observations}
    if obs_days != set(seen_days):
        raise HarnessError("observation records do not match day boundaries")
    result = RunResult(config, drifters, observations, final_metrics(world, drifters, config),
                       models.calibration, manifest.start_tick, world.clock, world, models, lowcred)
    if out_dir is not None:
        emit_reports(result, out_dir)
    return result


def _ranges(days: Sequence[int]) -> str:
    parts = []
    for _, grp in itertools.groupby(enumerate(days), key=lambda x: x[1] - x[0]):
        g = [d for _, d in grp]
        parts.append(str(g[0]) if len(g) == 1 else f"{g[0]}-{g[-1]}")
    return ", ".join(parts)


@dataclass
class ReplayReport:
    matched: list[str]
    mismatched: list[str]
    missing: list[str]

    @property
    def ok(self) -> bool:
        return not self.mismatched and not self.missing


def replay_manifest(manifest_path: str | Path, out_dir: str | Path) -> ReplayReport:
    """Re-run the manifest's config into ``out_dir`` and compare artifact hashes."""
    manifest = RunManifest.load(manifest_path)
    if manifest.status != "complete":
        raise HarnessError(f"manifest status is {manifest.status!r}; only complete runs can be replayed")
    config = manifest.experiment_config()
    if config.digest() != manifest.config_hash:
        raise HarnessError("config hash does not match the stored config")
    new, _ = run_experiment(config, out_dir)
    matched, mismatched, missing = [], [], []
    for name, digest in sorted(manifest.artifacts.items()):
        got = new.artifacts.get(name)
        if got is None:
            missing.append(name)
        elif got == digest:
            matched.append(name)
        else:
            mismatched.append(name)
    return ReplayReport(matched, mismatched, missing)
