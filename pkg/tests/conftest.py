import random

import pytest
from hypothesis import HealthCheck, settings

from drifters.platform import World

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# acceptance verdicts, printed once at the end of the session
ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, title: str, passed: bool, detail: str = "") -> None:
    verdict = "PASS" if passed else "FAIL"
    line = f"[{verdict}] criterion {number:>2}: {title}"
    if detail:
        line += f" ({detail})"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def small_world():
    """Five accounts, a few follows and tweets; clock at minute 100."""
    w = World(seed=1)
    ids = [w.create_account(alignment=a) for a in (-0.8, -0.4, 0.0, 0.4, 0.8)]
    w.follow(ids[0], ids[1])
    w.follow(ids[0], ids[2])
    w.follow(ids[1], ids[2])
    w.advance(10)
    w.post_tweet(ids[1], hashtags=["#a"], links=["left.example"])
    w.advance(20)
    w.post_tweet(ids[2], hashtags=["#b"], links=["https://www.center.example/x"])
    w.advance(30)
    w.post_tweet(ids[1], "retweet", 1)
    w.advance(100)
    return w, ids
