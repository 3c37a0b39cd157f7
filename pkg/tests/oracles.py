"""Independent high-precision reference formulas.

Written directly from textbook definitions with mpmath at 50 digits; they
share no code with the package.
"""
import mpmath as mp

mp.mp.dps = 50


def _mean(xs):
    return mp.fsum(xs) / len(xs)


def _var(xs):
    m = _mean(xs)
    return mp.fsum((x - m) ** 2 for x in xs) / (len(xs) - 1)


def t_sf_two_sided(t, df):
    """2 * P(T > |t|) through the incomplete beta integral."""
    t, df = mp.mpf(t), mp.mpf(df)
    x = df / (df + t * t)
    return mp.betainc(df / 2, mp.mpf(1) / 2, 0, x, regularized=True)


def student(x, y):
    x = [mp.mpf(v) for v in x]
    y = [mp.mpf(v) for v in y]
    n1, n2 = len(x), len(y)
    sp2 = ((n1 - 1) * _var(x) + (n2 - 1) * _var(y)) / (n1 + n2 - 2)
    t = (_mean(x) - _mean(y)) / mp.sqrt(sp2 * (mp.mpf(1) / n1 + mp.mpf(1) / n2))
    d = (_mean(x) - _mean(y)) / mp.sqrt(sp2)
    return t, t_sf_two_sided(t, n1 + n2 - 2), d


def welch(x, y):
    x = [mp.mpf(v) for v in x]
    y = [mp.mpf(v) for v in y]
    a, b = _var(x) / len(x), _var(y) / len(y)
    t = (_mean(x) - _mean(y)) / mp.sqrt(a + b)
    df = (a + b) ** 2 / (a * a / (len(x) - 1) + b * b / (len(y) - 1))
    return t, df, t_sf_two_sided(t, df)


def paired(x, y):
    d = [mp.mpf(a) - mp.mpf(b) for a, b in zip(x, y)]
    sd = mp.sqrt(_var(d))
    t = _mean(d) / (sd / mp.sqrt(len(d)))
    return t, t_sf_two_sided(t, len(d) - 1), _mean(d) / sd


def pearson_r(x, y):
    x = [mp.mpf(v) for v in x]
    y = [mp.mpf(v) for v in y]
    mx, my = _mean(x), _mean(y)
    sxy = mp.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = mp.fsum((a - mx) ** 2 for a in x)
    syy = mp.fsum((b - my) ** 2 for b in y)
    r = sxy / mp.sqrt(sxx * syy)
    df = len(x) - 2
    t = r * mp.sqrt(df / (1 - r * r))
    return r, t_sf_two_sided(t, df)


def slope(t, y):
    t = [mp.mpf(v) for v in t]
    y = [mp.mpf(v) for v in y]
    mt, my = _mean(t), _mean(y)
    return mp.fsum((a - mt) * (b - my) for a, b in zip(t, y)) / mp.fsum((a - mt) ** 2 for a in t)


def ols_coefficients(X, y):
    """Normal equations solved in high precision; returns (coef, se)."""
    Xm = mp.matrix([[mp.mpf(v) for v in row] for row in X])
    ym = mp.matrix([mp.mpf(v) for v in y])
    xtx = Xm.T * Xm
    inv = xtx ** -1
    beta = inv * (Xm.T * ym)
    resid = ym - Xm * beta
    n, p = Xm.rows, Xm.cols
    s2 = mp.fsum(resid[i] ** 2 for i in range(n)) / (n - p)
    se = [mp.sqrt(s2 * inv[j, j]) for j in range(p)]
    return [beta[j] for j in range(p)], se


def rel_err(got, want):
    got, want = mp.mpf(got), mp.mpf(want)
    if want == 0:
        return abs(got)
    return abs(got - want) / abs(want)
