"""Sentiment distribution tables and the one-sample t-test.

The Student-t tail probability is computed in-house from the regularized
incomplete beta function (continued fraction, modified Lentz).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .ingest import Platform
from .sentiment import Label, SentimentResult

_CF_EPS = 1e-16
_CF_TINY = 1e-300
_CF_MAX_ITER = 10_000


class DegenerateSampleError(ValueError):
    pass


# ---------------------------------------------------------------- moments


@dataclass
class Moments:
    """Streaming count / mean / M2 (Welford); partials merge exactly-enough for parallel use."""

    n: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def add(self, x: float) -> None:
        self.n += 1
        delta = x - self.mean
        self.mean += delta / self.n
        self.m2 += delta * (x - self.mean)

    def merge(self, other: "Moments") -> "Moments":
        if other.n == 0:
            return Moments(self.n, self.mean, self.m2)
        if self.n == 0:
            return Moments(other.n, other.mean, other.m2)
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * other.n / n
        m2 = self.m2 + other.m2 + delta * delta * self.n * other.n / n
        return Moments(n, mean, m2)

    @property
    def variance(self) -> float:
        return self.m2 / (self.n - 1) if self.n > 1 else math.nan

    @classmethod
    def of(cls, xs: Iterable[float]) -> "Moments":
        m = cls()
        for x in xs:
            m.add(float(x))
        return m


# ---------------------------------------------------------------- special functions


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for I_x(a, b), valid for x < (a + 1) / (a + b + 2)."""
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
    raise ArithmeticError(f"incomplete beta did not converge (a={a}, b={b}, x={x})")


def betainc_regularized(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b) for a, b > 0 and 0 <= x <= 1."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")
    return _betainc(a, b, x, 1.0 - x)


def _betainc(a: float, b: float, x: float, y: float) -> float:
    # y = 1 - x, passed separately so callers can supply it without cancellation
    if x == 0.0 or y == 0.0:
        return 0.0 if x == 0.0 else 1.0
    log_front = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log(y)
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    # symmetry I_x(a, b) = 1 - I_y(b, a) keeps the fraction in its fast region
    return 1.0 - front * _betacf(b, a, y) / b


def student_t_sf2(t: float, df: float) -> float:
    """Two-sided tail probability P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if df <= 0:
        raise ValueError("df must be positive")
    if t == 0:
        return 1.0
    if math.isinf(t):
        return 0.0
    t2 = t * t
    # the tail is I_x(df/2, 1/2) with x = df/(df+t^2); evaluating it directly
    # (never as 1 - something) keeps full relative precision far out in the tail
    return _betainc(0.5 * df, 0.5, df / (df + t2), t2 / (df + t2))


def student_t_cdf(t: float, df: float) -> float:
    half = 0.5 * student_t_sf2(t, df)
    return half if t < 0 else 1.0 - half


# ---------------------------------------------------------------- t-test


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: int
    p: float
    p_lower: float
    n: int
    mean: float
    sd: float
    mu0: float

    def to_record(self) -> dict:
        return {
            "n": self.n,
            "mean": self.mean,
            "sd": self.sd,
            "mu0": self.mu0,
            "t": self.t,
            "df": self.df,
            "p_two_sided": self.p,
            "p_one_sided_less": self.p_lower,
        }


def one_sample_ttest(scores: Sequence[float], mu0: float = 0.0) -> TTestResult:
    """Test the sample mean against ``mu0``.

    ``p`` is two-sided; ``p_lower`` is the one-sided p-value for the
    alternative mean < mu0 (equal to p/2 when t < 0).
    """
    m = Moments.of(scores)
    if m.n < 2:
        raise DegenerateSampleError("degenerate sample: need at least 2 scores")
    if not m.m2 > 0:
        raise DegenerateSampleError("degenerate sample: zero variance")
    sd = math.sqrt(m.variance)
    t = (m.mean - mu0) / (sd / math.sqrt(m.n))
    df = m.n - 1
    p = student_t_sf2(t, df)
    p_lower = 0.5 * p if t < 0 else 1.0 - 0.5 * p
    return TTestResult(t=t, df=df, p=p, p_lower=p_lower, n=m.n, mean=m.mean, sd=sd, mu0=mu0)


# ---------------------------------------------------------------- distribution table


LABELS = (Label.NEGATIVE, Label.NEUTRAL, Label.POSITIVE)


@dataclass(frozen=True)
class DistributionRow:
    platform: str
    counts: tuple[int, int, int]
    compound_sum: float

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def percents(self) -> tuple[float, float, float]:
        return tuple(round(100.0 * c / self.n, 1) for c in self.counts)

    @property
    def mean(self) -> float:
        return round(self.compound_sum / self.n, 3)


@dataclass(frozen=True)
class DistributionTable:
    rows: tuple[DistributionRow, ...]

    COLUMNS = (
        "platform",
        "negative",
        "negative_pct",
        "neutral",
        "neutral_pct",
        "positive",
        "positive_pct",
        "n",
        "mean_score",
    )

    @property
    def combined(self) -> DistributionRow:
        return self.rows[-1]

    def records(self) -> list[list]:
        out = []
        for row in self.rows:
            pct = row.percents
            out.append(
                [
                    row.platform,
                    row.counts[0],
                    f"{pct[0]:.1f}",
                    row.counts[1],
                    f"{pct[1]:.1f}",
                    row.counts[2],
                    f"{pct[2]:.1f}",
                    row.n,
                    f"{row.mean:.3f}",
                ]
            )
        return out


def distribution_table(results: Iterable[tuple[Platform | str, SentimentResult]]) -> DistributionTable:
    """Per-platform label counts and mean compound, plus a Combined row."""
    counts: dict[Platform, list[int]] = {}
    sums: dict[Platform, list[float]] = {}
    for platform, res in results:
        platform = Platform.parse(platform)
        counts.setdefault(platform, [0, 0, 0])[LABELS.index(res.label)] += 1
        sums.setdefault(platform, []).append(res.compound)
    if not counts:
        raise ValueError("distribution table needs at least one scored post")
    rows = [
        DistributionRow(p.value, tuple(counts[p]), math.fsum(sums[p])) for p in Platform if p in counts
    ]
    total_counts = tuple(sum(r.counts[i] for r in rows) for i in range(3))
    total_sum = math.fsum(x for p in Platform if p in sums for x in sums[p])
    rows.append(DistributionRow("Combined", total_counts, total_sum))
    return DistributionTable(tuple(rows))
