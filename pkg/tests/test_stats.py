import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from drifters import stats

TOL = 1e-6


def fixtures(n=100, seed=2024):
    """Random sample pairs of varied size, location, scale and shape."""
    g = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        n1, n2 = int(g.integers(3, 40)), int(g.integers(3, 40))
        shift, scale = g.normal(0, 2), g.uniform(0.1, 10)
        if g.random() < 0.5:
            x = g.normal(shift, scale, n1)
        else:
            x = shift + scale * g.exponential(1.0, n1)
        y = g.normal(0, g.uniform(0.1, 10), n2)
        out.append((x, y))
    return out


FIXTURES = fixtures()


def check(got, want):
    assert oracles.rel_err(got, want) < TOL, (got, want)


@pytest.mark.parametrize("k", range(len(FIXTURES)))
def test_student_matches_oracle(k):
    x, y = FIXTURES[k]
    res = stats.ttest_two_sample(x, y)
    t, p, d = oracles.student(x, y)
    check(res.statistic, t)
    check(res.p, p)
    check(res.effect, d)
    check(stats.cohens_d(x, y), d)


@pytest.mark.parametrize("k", range(0, len(FIXTURES), 5))
def test_welch_matches_oracle(k):
    x, y = FIXTURES[k]
    res = stats.ttest_two_sample(x, y, equal_var=False)
    t, df, p = oracles.welch(x, y)
    check(res.statistic, t)
    check(res.df, df)
    check(res.p, p)


@pytest.mark.parametrize("k", range(len(FIXTURES)))
def test_paired_matches_oracle(k):
    x, y = FIXTURES[k]
    n = min(len(x), len(y))
    y2 = y[:n] + 0.3 * x[:n]
    res = stats.ttest_paired(x[:n], y2)
    t, p, d = oracles.paired(x[:n], y2)
    check(res.statistic, t)
    check(res.p, p)
    check(res.effect, d)


@pytest.mark.parametrize("k", range(len(FIXTURES)))
def test_pearson_and_slope_match_oracle(k):
    x, y = FIXTURES[k]
    n = min(len(x), len(y))
    yy = y[:n] + 0.5 * x[:n]
    res = stats.pearson(x[:n], yy)
    r, p = oracles.pearson_r(x[:n], yy)
    check(res.effect, r)
    check(res.p, p)
    check(stats.ols_slope(x[:n], yy), oracles.slope(x[:n], yy))


@pytest.mark.parametrize("k", range(0, len(FIXTURES), 4))
def test_ols_matches_normal_equations(k):
    x, y = FIXTURES[k]
    n = len(x)
    g = np.random.default_rng(k)
    X = np.column_stack([np.ones(n), np.arange(n, dtype=float), g.normal(size=n)])
    fit = stats.ols(X, x)
    coef, se = oracles.ols_coefficients(X, x)
    for j in range(3):
        check(fit.coef[j], coef[j])
        check(fit.se[j], se[j])


@pytest.mark.parametrize("df", [1, 2, 3.5, 10, 57, 400])
@pytest.mark.parametrize("t", [0.0, 0.1, 1.0, 2.5, 8.0, -3.0])
def test_t_tail_against_mpmath(t, df):
    check(stats.t_two_sided_p(t, df), oracles.t_sf_two_sided(t, df))


def test_betainc_endpoints_and_symmetry():
    assert stats.betainc(2.0, 3.0, 0.0) == 0.0
    assert stats.betainc(2.0, 3.0, 1.0) == 1.0
    for x in (0.1, 0.4, 0.77):
        assert stats.betainc(2.5, 1.5, x) + stats.betainc(1.5, 2.5, 1 - x) == pytest.approx(1.0, abs=1e-13)
    with pytest.raises(ValueError):
        stats.betainc(1.0, 1.0, 1.5)


def test_zero_variance_is_flagged_not_nan():
    res = stats.ttest_two_sample([1.0, 1.0, 1.0], [1.0, 1.0])
    assert res.degenerate and res.p == 1.0 and res.statistic == 0.0
    res = stats.ttest_two_sample([2.0, 2.0], [1.0, 1.0, 1.0])
    assert res.degenerate and res.exact_difference and res.statistic == 1.0
    res = stats.ttest_paired([0.3, 0.5, 0.7], [0.1, 0.3, 0.5])
    assert res.degenerate and res.p == 0.0
    assert stats.cohens_d([1.0, 1.0], [1.0, 1.0]) is None
    assert stats.pearson([1, 1, 1], [1, 2, 3]).degenerate


def test_exact_line_gives_exact_ols():
    t = np.arange(10.0)
    fit = stats.ols(np.column_stack([np.ones(10), t]), 3.0 + 2.0 * t)
    assert fit.exact
    assert fit.coef[1] == pytest.approx(2.0, abs=1e-12)
    res = fit.coef_test(1)
    assert res.degenerate and res.p == 0.0


def test_input_validation():
    with pytest.raises(ValueError):
        stats.ttest_two_sample([1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        stats.ttest_paired([1.0, 2.0], [1.0])
    with pytest.raises(ValueError):
        stats.pearson([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        stats.ols(np.ones((2, 2)), [1.0, 2.0])
    with pytest.raises(ValueError):
        stats.ols_slope([1.0, 1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        stats.bonferroni(0.1, 0)


@given(st.floats(0, 1), st.integers(1, 500))
def test_bonferroni_is_clamped_multiplication(p, m):
    b = stats.bonferroni(p, m)
    assert 0.0 <= b <= 1.0
    assert b == min(1.0, p * m)


@given(st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=30),
       st.floats(-100, 100), st.floats(0.01, 100))
def test_t_statistic_invariant_to_affine_maps(xs, shift, scale):
    x = np.array(xs)
    y = x[::-1] + np.linspace(0, 1, len(x))
    a = stats.ttest_paired(x, y)
    b = stats.ttest_paired(scale * x + shift, scale * y + shift)
    if a.degenerate or b.degenerate:
        return
    assert b.statistic == pytest.approx(a.statistic, rel=1e-6, abs=1e-9)


@given(st.lists(st.floats(-50, 50), min_size=2, max_size=20))
def test_mean_se(xs):
    m, se = stats.mean_se(xs)
    assert m == pytest.approx(math.fsum(xs) / len(xs), abs=1e-9)
    assert se is not None and se >= 0
