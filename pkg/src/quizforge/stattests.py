"""Classical tests backing the quiz engine: t-tests, exact binomial,
simple regression.

Formulas are the textbook ones; distribution tail areas come from
scipy.special (incomplete beta) rather than a hand-rolled CDF.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import special


class StatError(ValueError):
    pass


@dataclass(frozen=True)
class StatResult:
    kind: str
    estimate: float
    statistic: float
    p_value: float
    conf_low: float
    conf_high: float
    df: float | None = None
    extra: tuple = ()

    def fields(self) -> dict:
        d = {
            "kind": self.kind,
            "estimate": self.estimate,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "conf_low": self.conf_low,
            "conf_high": self.conf_high,
        }
        if self.df is not None:
            d["df"] = self.df
        d.update(self.extra)
        return d

    def __getitem__(self, name: str):
        return self.fields()[name]


def _t_cdf(t: float, df: float) -> float:
    return special.stdtr(df, t)


def _t_quantile(p: float, df: float) -> float:
    return float(special.stdtrit(df, p))


def _two_sided_t_p(t: float, df: float) -> float:
    return 2.0 * (1.0 - _t_cdf(abs(t), df))


def _mean_sd(x) -> tuple[float, float, int]:
    n = len(x)
    if n < 2:
        raise StatError("need at least 2 observations")
    m = sum(x) / n
    v = sum((xi - m) ** 2 for xi in x) / (n - 1)
    if v == 0:
        raise StatError("zero variance")
    return m, math.sqrt(v), n


def t_one_sample(x, mu0: float = 0.0, conf_level: float = 0.95) -> StatResult:
    m, s, n = _mean_sd(x)
    se = s / math.sqrt(n)
    t = (m - mu0) / se
    df = n - 1
    tc = _t_quantile(1 - (1 - conf_level) / 2, df)
    return StatResult("t_one_sample", m, t, _two_sided_t_p(t, df),
                      m - tc * se, m + tc * se, df)


def t_two_sample(x, y, conf_level: float = 0.95) -> StatResult:
    """Welch two-sample t-test."""
    mx, sx, nx = _mean_sd(x)
    my, sy, ny = _mean_sd(y)
    vx, vy = sx ** 2 / nx, sy ** 2 / ny
    se = math.sqrt(vx + vy)
    t = (mx - my) / se
    df = (vx + vy) ** 2 / (vx ** 2 / (nx - 1) + vy ** 2 / (ny - 1))
    tc = _t_quantile(1 - (1 - conf_level) / 2, df)
    diff = mx - my
    return StatResult("t_two_sample", diff, t, _two_sided_t_p(t, df),
                      diff - tc * se, diff + tc * se, df)


def _binom_pmf(k: int, n: int, p: float) -> float:
    if p == 0.0:
        return 1.0 if k == 0 else 0.0
    if p == 1.0:
        return 1.0 if k == n else 0.0
    return math.exp(math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
                    + k * math.log(p) + (n - k) * math.log1p(-p))


def binom_exact(k: int, n: int, p0: float = 0.5, conf_level: float = 0.95) -> StatResult:
    """Exact binomial test; two-sided p sums pmf values <= pmf(k)."""
    if n < 1 or not 0 <= k <= n:
        raise StatError("need 0 <= k <= n, n >= 1")
    if not 0 <= p0 <= 1:
        raise StatError("p0 must be in [0, 1]")
    pk = _binom_pmf(k, n, p0)
    rel = 1 + 1e-7
    p = min(1.0, sum(_binom_pmf(i, n, p0) for i in range(n + 1)
                     if _binom_pmf(i, n, p0) <= pk * rel))
    phat = k / n
    # Clopper-Pearson interval via beta quantiles
    alpha = 1 - conf_level
    lo = 0.0 if k == 0 else float(special.betaincinv(k, n - k + 1, alpha / 2))
    hi = 1.0 if k == n else float(special.betaincinv(k + 1, n - k, 1 - alpha / 2))
    return StatResult("binom_exact", phat, float(k), p, lo, hi, None,
                      extra=(("n", float(n)),))


def simple_regression(x, y, conf_level: float = 0.95) -> StatResult:
    """Least-squares line y = a + b x; statistic/p refer to the slope."""
    n = len(x)
    if n != len(y):
        raise StatError("x and y must have equal length")
    if n < 3:
        raise StatError("need at least 3 points")
    mx = sum(x) / n
    my = sum(y) / n
    sxx = sum((xi - mx) ** 2 for xi in x)
    if sxx == 0:
        raise StatError("zero variance in x")
    sxy = sum((xi - mx) * (yi - my) for xi, yi in zip(x, y))
    b = sxy / sxx
    a = my - b * mx
    resid = [yi - (a + b * xi) for xi, yi in zip(x, y)]
    df = n - 2
    s2 = sum(r ** 2 for r in resid) / df
    se_b = math.sqrt(s2 / sxx)
    se_a = math.sqrt(s2 * (1 / n + mx ** 2 / sxx))
    if se_b == 0:
        t = math.inf
        p = 0.0
    else:
        t = b / se_b
        p = _two_sided_t_p(t, df)
    tc = _t_quantile(1 - (1 - conf_level) / 2, df)
    return StatResult("simple_regression", b, t, p,
                      b - tc * se_b, b + tc * se_b, df,
                      extra=(("intercept", a), ("slope", b), ("se_intercept", se_a),
                             ("se_slope", se_b)))


def stat_test(kind: str, data, params: dict | None = None) -> StatResult:
    params = dict(params or {})
    if kind == "t_one_sample":
        return t_one_sample(data, params.get("mu", 0.0), params.get("conf_level", 0.95))
    if kind == "t_two_sample":
        return t_two_sample(data[0], data[1], params.get("conf_level", 0.95))
    if kind == "binom_exact":
        return binom_exact(int(data[0]), int(data[1]),
                           params.get("p", 0.5), params.get("conf_level", 0.95))
    if kind == "simple_regression":
        return simple_regression(data[0], data[1], params.get("conf_level", 0.95))
    raise StatError(f"unknown test kind {kind!r}")
