"""Small statistics toolbox: t-tests, Cohen's d, Pearson r, OLS, Bonferroni.

The Student-t tail comes from a continued-fraction regularized incomplete
beta, so results do not depend on an external stats package. Zero-variance
inputs are reported through ``TestResult.degenerate`` instead of producing
infinities or NaN.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

_EPS = 1e-15
_FPMIN = 1e-300
_ZERO_VAR = 1e-24  # relative variance treated as exactly zero


@dataclass(frozen=True)
class TestResult:
    statistic: float
    df: float
    p: float
    effect: float | None
    n: tuple[int, ...]
    method: str
    degenerate: bool = False

    @property
    def exact_difference(self) -> bool:
        """Zero-variance case with a nonzero difference."""
        return self.degenerate and self.p == 0.0

    def as_row(self) -> dict:
        return {
            "method": self.method,
            "statistic": self.statistic,
            "df": self.df,
            "p": self.p,
            "effect": self.effect,
            "n": "/".join(str(k) for k in self.n),
            "degenerate": self.degenerate,
        }


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, 10_000):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    lbt = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(lbt) * _betacf(a, b, x) / a
    return 1.0 - math.exp(lbt) * _betacf(b, a, 1.0 - x) / b


def t_two_sided_p(t: float, df: float) -> float:
    if df <= 0:
        raise ValueError("df must be positive")
    if math.isinf(t):
        return 0.0
    return min(1.0, betainc(0.5 * df, 0.5, df / (df + t * t)))


def t_cdf(t: float, df: float) -> float:
    tail = 0.5 * t_two_sided_p(t, df)
    return 1.0 - tail if t > 0 else tail


def _arr(x) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if a.ndim != 1:
        raise ValueError("expected a 1-d sample")
    return a


def _is_zero_var(var: float, scale: float) -> bool:
    return var <= _ZERO_VAR * max(1.0, scale * scale)


def _degenerate(diff: float, df: float, n: tuple[int, ...], method: str) -> TestResult:
    if diff == 0.0:
        return TestResult(0.0, df, 1.0, None, n, method, True)
    return TestResult(math.copysign(1.0, diff), df, 0.0, None, n, method, True)


def ttest_two_sample(x: Sequence[float], y: Sequence[float], equal_var: bool = True) -> TestResult:
    """Two-sided two-sample t-test; pooled variance by default, Welch on request."""
    x, y = _arr(x), _arr(y)
    n1, n2 = len(x), len(y)
    if n1 < 2 or n2 < 2:
        raise ValueError("each sample needs at least 2 observations")
    m1, m2 = x.mean(), y.mean()
    v1, v2 = x.var(ddof=1), y.var(ddof=1)
    diff = m1 - m2
    scale = max(abs(m1), abs(m2))
    if equal_var:
        df = n1 + n2 - 2
        sp2 = ((n1 - 1) * v1 + (n2 - 1) * v2) / df
        if _is_zero_var(sp2, scale):
            return _degenerate(_snap(diff, scale), df, (n1, n2), "student")
        se = math.sqrt(sp2 * (1.0 / n1 + 1.0 / n2))
        method = "student"
    else:
        a, b = v1 / n1, v2 / n2
        if _is_zero_var(a + b, scale):
            return _degenerate(_snap(diff, scale), float(n1 + n2 - 2), (n1, n2), "welch")
        se = math.sqrt(a + b)
        df = (a + b) ** 2 / (a * a / (n1 - 1) + b * b / (n2 - 1))
        method = "welch"
    t = diff / se
    return TestResult(float(t), float(df), t_two_sided_p(t, df), cohens_d(x, y), (n1, n2), method)


def ttest_paired(x: Sequence[float], y: Sequence[float]) -> TestResult:
    """Two-sided paired t-test on ``x - y``; effect is the paired Cohen's d."""
    x, y = _arr(x), _arr(y)
    if len(x) != len(y):
        raise ValueError("paired samples must have equal length")
    n = len(x)
    if n < 2:
        raise ValueError("need at least 2 pairs")
    d = x - y
    md = d.mean()
    vd = d.var(ddof=1)
    scale = max(np.abs(x).max(), np.abs(y).max())
    if _is_zero_var(vd, scale):
        return _degenerate(_snap(md, scale), n - 1, (n,), "paired")
    sd = math.sqrt(vd)
    t = md / (sd / math.sqrt(n))
    return TestResult(float(t), float(n - 1), t_two_sided_p(t, n - 1), float(md / sd), (n,), "paired")


def _snap(value: float, scale: float) -> float:
    return 0.0 if abs(value) <= 1e-12 * max(1.0, scale) else float(value)


def cohens_d(x: Sequence[float], y: Sequence[float]) -> float | None:
    """Mean difference over the pooled standard deviation; None if that is zero."""
    x, y = _arr(x), _arr(y)
    n1, n2 = len(x), len(y)
    sp2 = ((n1 - 1) * x.var(ddof=1) + (n2 - 1) * y.var(ddof=1)) / (n1 + n2 - 2)
    if _is_zero_var(sp2, max(abs(x.mean()), abs(y.mean()))):
        return None
    return float((x.mean() - y.mean()) / math.sqrt(sp2))


def pearson(x: Sequence[float], y: Sequence[float]) -> TestResult:
    x, y = _arr(x), _arr(y)
    n = len(x)
    if n != len(y):
        raise ValueError("samples must have equal length")
    if n < 3:
        raise ValueError("need at least 3 pairs")
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    df = n - 2
    if _is_zero_var(sxx / n, np.abs(x).max()) or _is_zero_var(syy / n, np.abs(y).max()):
        return TestResult(0.0, df, 1.0, None, (n,), "pearson", True)
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    if 1.0 - abs(r) < 1e-12:
        r = math.copysign(1.0, r)
        return TestResult(r, df, 0.0, r, (n,), "pearson", True)
    t = r * math.sqrt(df / (1.0 - r * r))
    return TestResult(t, df, t_two_sided_p(t, df), r, (n,), "pearson")


def bonferroni(p: float, m: int) -> float:
    if m < 1:
        raise ValueError("m must be at least 1")
    return min(1.0, p * m)


@dataclass(frozen=True)
class OLSFit:
    coef: np.ndarray
    se: np.ndarray
    df: int
    rss: float
    exact: bool  # residuals vanish; standard errors are zero

    def coef_test(self, j: int, method: str = "ols") -> TestResult:
        n = (self.df + len(self.coef),)
        b = float(self.coef[j])
        if self.exact or self.se[j] == 0.0:
            return _degenerate(b, self.df, n, method)
        t = b / float(self.se[j])
        return TestResult(t, float(self.df), t_two_sided_p(t, self.df), b, n, method)


def ols(X: np.ndarray, y: Sequence[float]) -> OLSFit:
    """Ordinary least squares with classical standard errors."""
    X = np.asarray(X, dtype=float)
    y = _arr(y)
    n, p = X.shape
    if n <= p:
        raise ValueError("need more observations than parameters")
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    rss = float(resid @ resid)
    df = n - p
    scale = float(np.abs(y).max()) if n else 0.0
    exact = rss <= _ZERO_VAR * max(1.0, scale * scale) * n
    if exact:
        coef = np.where(np.abs(coef) <= 1e-9 * max(1.0, scale), 0.0, coef)
        return OLSFit(coef, np.zeros(p), df, rss, True)
    cov = rss / df * np.linalg.inv(X.T @ X)
    return OLSFit(coef, np.sqrt(np.diag(cov)), df, rss, False)


def ols_slope(t: Sequence[float], y: Sequence[float]) -> float:
    t, y = _arr(t), _arr(y)
    if len(t) < 2:
        raise ValueError("need at least 2 points for a slope")
    dt = t - t.mean()
    sxx = float(dt @ dt)
    if sxx == 0.0:
        raise ValueError("slope undefined for constant time")
    return float(dt @ (y - y.mean())) / sxx


def mean_se(values: Sequence[float]) -> tuple[float, float | None]:
    v = _arr(values)
    if len(v) == 0:
        raise ValueError("empty sample")
    m = float(v.mean())
    if len(v) < 2:
        return m, None
    return m, float(v.std(ddof=1) / math.sqrt(len(v)))
