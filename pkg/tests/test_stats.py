from __future__ import annotations

import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from civic_pulse.sentiment import Label, SentimentResult
from civic_pulse.stats import (
    DegenerateSampleError,
    Moments,
    betainc_regularized,
    distribution_table,
    one_sample_ttest,
    student_t_cdf,
    student_t_sf2,
)


def result(compound: float) -> SentimentResult:
    label = Label.NEGATIVE if compound <= -0.05 else Label.POSITIVE if compound >= 0.05 else Label.NEUTRAL
    return SentimentResult(0.0, 1.0, 0.0, compound, label)


# ---------------------------------------------------------------- special functions


@pytest.mark.parametrize(
    "a, b, x",
    [(0.5, 0.5, 0.3), (2, 3, 0.4), (10, 0.5, 0.99), (249.5, 0.5, 0.97), (0.5, 250, 1e-3), (1, 1, 0.25), (50, 50, 0.5)],
)
def test_betainc_against_mpmath(a, b, x):
    want = float(mpmath.betainc(a, b, 0, x, regularized=True))
    assert betainc_regularized(a, b, x) == pytest.approx(want, abs=1e-12)


@given(st.floats(0.1, 300), st.floats(0.1, 300), st.floats(0, 1))
def test_betainc_error_bound(a, b, x):
    with mpmath.workdps(30):
        want = float(mpmath.betainc(a, b, 0, x, regularized=True))
    assert abs(betainc_regularized(a, b, x) - want) <= 1e-10


def test_betainc_domain():
    with pytest.raises(ValueError):
        betainc_regularized(0, 1, 0.5)
    with pytest.raises(ValueError):
        betainc_regularized(1, 1, 1.5)


def test_t_distribution_reference_values():
    # two-sided critical values from standard t tables
    assert student_t_sf2(2.776445105, 4) == pytest.approx(0.05, abs=1e-9)
    assert student_t_sf2(1.959963985, 1e9) == pytest.approx(0.05, abs=1e-7)
    assert student_t_cdf(0.0, 7) == 0.5
    assert student_t_sf2(0.0, 3) == 1.0


@given(st.floats(0, 50), st.floats(0, 50), st.integers(1, 500))
def test_p_monotone_in_abs_t(t1, t2, df):
    lo, hi = sorted((t1, t2))
    assert student_t_sf2(hi, df) <= student_t_sf2(lo, df)


# ---------------------------------------------------------------- t-test


def test_symmetric_sample():
    r = one_sample_ttest([-1, 0, 1], 0)
    assert r.t == 0 and r.p == 1 and r.df == 2


def test_hand_computed():
    r = one_sample_ttest([1, 2, 3, 4, 5], 0)
    assert r.t == pytest.approx(3 / (math.sqrt(2.5) / math.sqrt(5)), abs=1e-12)
    assert r.df == 4 and r.n == 5 and r.mean == 3 and r.sd == pytest.approx(math.sqrt(2.5))
    want = float(mpmath.betainc(2, 0.5, 0, 4 / (4 + r.t**2), regularized=True))
    assert r.p == pytest.approx(want, abs=1e-12)


def test_one_sided():
    r = one_sample_ttest([-0.3, -0.1, -0.2, 0.05, -0.4], 0)
    assert r.t < 0 and r.p_lower == pytest.approx(r.p / 2)
    r = one_sample_ttest([0.3, 0.1, 0.2], 0)
    assert r.p_lower == pytest.approx(1 - r.p / 2)


@pytest.mark.parametrize("xs", [[], [0.5], [0.2, 0.2, 0.2]])
def test_degenerate(xs):
    with pytest.raises(DegenerateSampleError, match="degenerate sample"):
        one_sample_ttest(xs, 0)


_sample = st.lists(st.floats(-1, 1), min_size=2, max_size=50).filter(lambda xs: max(xs) - min(xs) > 1e-3)


@given(_sample, st.floats(-1, 1))
def test_antisymmetry(xs, mu0):
    a = one_sample_ttest(xs, mu0).t
    b = one_sample_ttest([-x for x in xs], -mu0).t
    assert a == pytest.approx(-b, abs=1e-12 * max(1, abs(a)))


@given(_sample, st.floats(-1, 1), st.floats(0.01, 100))
def test_scale_invariance(xs, mu0, c):
    a = one_sample_ttest(xs, mu0).t
    b = one_sample_ttest([c * x for x in xs], c * mu0).t
    assert a == pytest.approx(b, abs=1e-12 * max(1, abs(a)))


@given(st.lists(st.floats(-1, 1), max_size=40), st.lists(st.floats(-1, 1), max_size=40))
def test_moments_merge(xs, ys):
    merged = Moments.of(xs).merge(Moments.of(ys))
    whole = Moments.of(xs + ys)
    assert merged.n == whole.n
    assert merged.mean == pytest.approx(whole.mean, abs=1e-12)
    assert merged.m2 == pytest.approx(whole.m2, abs=1e-9)


# ---------------------------------------------------------------- distribution table


def test_hand_counted_fixture():
    scores = [-0.6, -0.3, -0.2, -0.05, 0.0, 0.01, -0.01, 0.02, 0.5, 0.7]
    table = distribution_table([("Twitter", result(s)) for s in scores])
    assert table.records()[0][:7] == ["Twitter", 4, "40.0", 4, "40.0", 2, "20.0"]


def test_singleton():
    table = distribution_table([("Reddit", result(0.42))])
    row = table.records()[0]
    assert row == ["Reddit", 0, "0.0", 0, "0.0", 1, "100.0", 1, "0.420"]


def test_combined_is_column_sum():
    data = [("Twitter", result(s)) for s in (-0.5, 0.0, 0.3)] + [("Reddit", result(s)) for s in (-0.2, -0.9)]
    table = distribution_table(data)
    recs = table.records()
    assert [r[0] for r in recs] == ["Twitter", "Reddit", "Combined"]
    for col in (1, 3, 5, 7):
        assert recs[-1][col] == sum(r[col] for r in recs[:-1])
    assert recs[-1][8] == f"{(-0.5 + 0.0 + 0.3 - 0.2 - 0.9) / 5:.3f}"


def test_empty_distribution_is_fatal():
    with pytest.raises(ValueError):
        distribution_table([])


@given(st.lists(st.tuples(st.sampled_from(["Twitter", "Reddit"]), st.floats(-1, 1)), min_size=1, max_size=60))
def test_percentages_sum_to_100(items):
    table = distribution_table([(p, result(s)) for p, s in items])
    for rec in table.records():
        assert abs(float(rec[2]) + float(rec[4]) + float(rec[6]) - 100) <= 0.1 + 1e-9
        assert rec[1] + rec[3] + rec[5] == rec[7]
