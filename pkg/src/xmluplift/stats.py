"""Summary statistics and Welch's unequal-variance t-test."""
from __future__ import annotations

import math
from dataclasses import dataclass

_CF_EPS = 1e-16
_CF_TINY = 1e-300
_CF_MAX_ITER = 500


class TooFewSamples(ValueError):
    pass


class DegenerateVariance(ValueError):
    pass


@dataclass(frozen=True)
class WelchResult:
    t: float
    df: float
    p: float
    significant: bool
    alpha: float = 0.05


def summary_stats(samples: list[float]) -> tuple[float, float]:
    """Arithmetic mean and sample (n - 1) standard deviation."""
    n = len(samples)
    if n < 2:
        raise TooFewSamples(f"need at least 2 samples, got {n}")
    mean = math.fsum(samples) / n
    var = math.fsum((x - mean) ** 2 for x in samples) / (n - 1)
    return mean, math.sqrt(var)


def _betacf(a: float, b: float, x: float) -> float:
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_sf(t: float, df: float) -> float:
    """Upper-tail probability P(T > t) of Student's t with ``df`` degrees of freedom."""
    if df <= 0:
        raise ValueError("df must be positive")
    if t == 0:
        return 0.5
    # tail = P(|T| > |t|) / 2 = I_{df/(df+t^2)}(df/2, 1/2) / 2
    t2 = t * t
    if t2 < df:
        # df/(df+t^2) rounds to 1 for tiny t; use the complement I_{t^2/(df+t^2)}(1/2, df/2)
        tail = 0.5 - 0.5 * betainc(0.5, df / 2.0, t2 / (df + t2))
    else:
        tail = 0.5 * betainc(df / 2.0, 0.5, df / (df + t2))
    return tail if t > 0 else 1.0 - tail


def welch_t_test(m1: float, s1: float, n1: int, m2: float, s2: float, n2: int,
                 alpha: float = 0.05) -> WelchResult:
    """Two-sided Welch test from summary statistics."""
    if n1 < 2 or n2 < 2:
        raise TooFewSamples("each group needs at least 2 observations")
    if s1 < 0 or s2 < 0:
        raise ValueError("standard deviations must be non-negative")
    if s1 == 0 and s2 == 0:
        raise DegenerateVariance("both groups have zero variance")
    v1, v2 = s1 * s1 / n1, s2 * s2 / n2
    se2 = v1 + v2
    t = (m1 - m2) / math.sqrt(se2)
    df = se2 * se2 / (v1 * v1 / (n1 - 1) + v2 * v2 / (n2 - 1))
    p = min(1.0, 2.0 * student_t_sf(abs(t), df))
    return WelchResult(t, df, p, p < alpha, alpha)


def welch_from_samples(a: list[float], b: list[float], alpha: float = 0.05) -> WelchResult:
    m1, s1 = summary_stats(a)
    m2, s2 = summary_stats(b)
    return welch_t_test(m1, s1, len(a), m2, s2, len(b), alpha)
