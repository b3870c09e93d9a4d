"""Acceptance criteria, one test per criterion, each at its stated tolerance.

Every test logs a PASS/FAIL line; the lines are repeated in the pytest
terminal summary under "acceptance criteria".
"""

from __future__ import annotations

import csv
import filecmp
import itertools
import json
import math
import random
import subprocess
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import mpmath
import numpy as np
import pytest

from civic_pulse.preprocess import read_docs_jsonl
from civic_pulse.report import (
    DISTRIBUTION_CSV,
    HISTOGRAM_COLUMNS,
    HISTOGRAM_CSV,
    MANIFEST_JSON,
    POINTS_GEOJSON,
    SPATIAL_COLUMNS,
    SPATIAL_CSV,
    TEMPORAL_COLUMNS,
    TEMPORAL_CSV,
    TOPIC_COLUMNS,
    TOPICS_CSV,
)
from civic_pulse.sentiment import SentimentResult, classify, default_lexicon, score_text
from civic_pulse.spatiotemporal import (
    BinTable,
    ZoneConfig,
    aggregate_bins,
    bin_temporal,
)
from civic_pulse.stats import DistributionTable, one_sample_ttest
from civic_pulse.synthetic import disjoint_topic_corpus
from civic_pulse.topics import build_dtm, fit_lda, select_num_topics

from conftest import FIXTURES, GOLDEN, TEST_DATA

SEEDS = (11, 22, 33, 44, 55)
BUNDLE = (
    DISTRIBUTION_CSV,
    TOPICS_CSV,
    SPATIAL_CSV,
    TEMPORAL_CSV,
    HISTOGRAM_CSV,
    POINTS_GEOJSON,
    MANIFEST_JSON,
    "ttest.json",
    "temporal_summary.csv",
    "model.json",
)


# ---------------------------------------------------------------- AC1


def test_ac1_example_scores(criterion):
    cases = [
        ("Avoid exit 374 if possible - major accident causing delays", -0.680),
        ("SmartTrips Knoxville promoting bike sharing to reduce Knoxville traffic congestion", 0.649),
    ]
    start = time.perf_counter()
    got = [score_text(text).compound for text, _ in cases]
    elapsed = time.perf_counter() - start
    ok = all(abs(g - want) <= 0.005 for g, (_, want) in zip(got, cases))
    criterion.record(1, "two example scores within 0.005", ok, f"got {got[0]:.4f}, {got[1]:.4f} in {elapsed * 1e3:.1f} ms")
    assert ok


# ---------------------------------------------------------------- AC2


def test_ac2_reference_differential(criterion):
    with open(TEST_DATA / "vader_reference.tsv", encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh, delimiter="\t", quoting=csv.QUOTE_NONE))
    assert len(rows) == 300
    lex = default_lexicon()
    misses = [
        (r["sentence"], float(r["compound"]), score_text(r["sentence"], lex).compound)
        for r in rows
        if abs(score_text(r["sentence"], lex).compound - float(r["compound"])) > 0.001
    ]
    rate = 1 - len(misses) / len(rows)
    for sentence, want, got in misses:
        print(f"  discrepancy: {sentence!r}: reference {want}, ours {got:.4f}")
    ok = rate >= 0.98
    criterion.record(2, "300-sentence differential, >=98% within 0.001", ok, f"{rate:.1%} agree, {len(misses)} miss")
    assert ok


# ---------------------------------------------------------------- AC3

_WORDS = [
    "good", "bad", "great", "terrible", "love", "hate", "traffic", "accident", "delay", "safe",
    "not", "never", "isn't", "without", "very", "extremely", "slightly", "kind of", "sort of",
    "but", "no", "least", "at least", "so", "this", "doubt", "cool", "the shit", "bomb",
    "GREAT", "HORRIBLE", "Knoxville", ":)", ":(", "<3", "\U0001f600", "\U0001f621", "lol",
]
_PUNCT = ["", "", "!", "!!", "!!!!!", "?", "??", "????", ".", ",", "-", "...", "?!"]


def _fuzz_strings(n: int, seed: int) -> list[str]:
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        mode = rng.random()
        if mode < 0.1:
            # raw garbage, including control characters and astral code points
            out.append("".join(chr(rng.choice([rng.randrange(32, 127), rng.randrange(0x80, 0x2FFF),
                                               rng.randrange(0x1F300, 0x1F6FF), rng.randrange(0, 32)]))
                               for _ in range(rng.randrange(0, 40))))
            continue
        words = [rng.choice(_WORDS) for _ in range(rng.randrange(0, 15))]
        if rng.random() < 0.3:
            words = [w.upper() if rng.random() < 0.5 else w for w in words]
        out.append(" ".join(words) + rng.choice(_PUNCT))
    return out


def test_ac3_property_suite(criterion):
    texts = _fuzz_strings(10_000, seed=3)
    lex = default_lexicon()
    start = time.perf_counter()
    bad = []
    for text in texts:
        r = score_text(text, lex)
        if abs(r.neg + r.neu + r.pos - 1) > 1e-6 or not -1 <= r.compound <= 1 or r.label is not classify(r.compound):
            bad.append(text)
    elapsed = time.perf_counter() - start
    thresholds = [classify(-0.05).value, classify(-0.0499999).value, classify(0.0499999).value, classify(0.05).value]
    thresholds_ok = thresholds == ["Negative", "Neutral", "Neutral", "Positive"]
    ok = not bad and thresholds_ok and elapsed < 10
    criterion.record(3, "10,000 fuzzed strings", ok, f"{len(bad)} violations, thresholds {thresholds_ok}, {elapsed:.2f} s")
    assert ok, bad[:5]


# ---------------------------------------------------------------- AC4


def _purity(labels: list[int], predicted: np.ndarray, k: int) -> float:
    best = 0
    for perm in itertools.permutations(range(k)):
        best = max(best, sum(perm[p] == t for p, t in zip(predicted, labels)))
    return best / len(labels)


def test_ac4_lda_recovery(criterion):
    start = time.perf_counter()
    purities, picks = [], []
    for seed in SEEDS:
        docs, labels = disjoint_topic_corpus(seed)
        dtm = build_dtm(docs)
        model = fit_lda(dtm, 3, seed=seed)
        purities.append(_purity(labels, model.dominant_topics(), 3))
        picks.append(select_num_topics(dtm, [2, 3, 6], seed=seed).K)
    elapsed = time.perf_counter() - start
    n_pure = sum(p >= 0.9 for p in purities)
    n_pick = sum(k == 3 for k in picks)
    ok = n_pure >= 4 and n_pick >= 4 and elapsed < 60
    criterion.record(
        4, "LDA purity >=0.9 and K=3 selected in >=4/5 seeds", ok,
        f"purity {[round(p, 3) for p in purities]}, picks {picks}, {elapsed:.1f} s",
    )
    assert ok


# ---------------------------------------------------------------- AC5


def test_ac5_lda_invariants(criterion):
    docs, _ = disjoint_topic_corpus(SEEDS[0])
    dtm = build_dtm(docs)
    error = None
    try:
        model = fit_lda(dtm, 3, iters=1000, seed=SEEDS[0], debug=True)
    except AssertionError as exc:
        error = exc
    ok = error is None
    if ok:
        ok = bool(np.all(np.abs(model.phi.sum(axis=1) - 1) <= 1e-9) and np.all(np.abs(model.theta.sum(axis=1) - 1) <= 1e-9))
    criterion.record(5, "simplex and count conservation after every sweep", ok, "1000 debug sweeps" if error is None else str(error))
    assert ok


# ---------------------------------------------------------------- AC6


def _reference_t_and_p(xs: list[float]) -> tuple[float, float]:
    with mpmath.workdps(50):
        n = len(xs)
        m = mpmath.fsum(mpmath.mpf(x) for x in xs) / n
        var = mpmath.fsum((mpmath.mpf(x) - m) ** 2 for x in xs) / (n - 1)
        t = m / mpmath.sqrt(var / n)
        df = n - 1
        p = mpmath.betainc(mpmath.mpf(df) / 2, mpmath.mpf(1) / 2, 0, df / (df + t * t), regularized=True)
        return float(t), float(p)


def test_ac6_ttest_oracle(criterion):
    rng = np.random.default_rng(6)
    worst_t = worst_p = 0.0
    for _ in range(100):
        n = int(rng.integers(5, 501))
        xs = rng.normal(rng.uniform(-0.5, 0.5), rng.uniform(0.2, 2.0), size=n).tolist()
        res = one_sample_ttest(xs, 0.0)
        t_ref, p_ref = _reference_t_and_p(xs)
        worst_t = max(worst_t, abs(res.t - t_ref))
        worst_p = max(worst_p, abs(res.p - p_ref))
    hand = one_sample_ttest([1, 2, 3, 4, 5], 0.0)
    hand_ok = abs(hand.t - 3 / (math.sqrt(2.5) / math.sqrt(5))) <= 1e-12 and hand.df == 4
    ok = worst_t <= 1e-12 and worst_p <= 1e-8 and hand_ok
    criterion.record(
        6, "t within 1e-12, p within 1e-8 of mpmath; [1..5] gives t=4.2426 df=4", ok,
        f"max |dt| {worst_t:.1e}, max |dp| {worst_p:.1e}, hand t={hand.t:.4f} df={hand.df}",
    )
    assert ok


# ---------------------------------------------------------------- AC7


@pytest.fixture(scope="module")
def fixture_run(tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("run_a")
    _run_all(out)
    return out


def _run_all(out: Path) -> subprocess.CompletedProcess:
    proc = subprocess.run(
        [sys.executable, "-m", "civic_pulse.cli", "run", "all", "--config", str(FIXTURES / "config.json"), "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return proc


def test_ac7_spatiotemporal(criterion, fixture_run):
    stages = fixture_run / "stages"
    docs = read_docs_jsonl(stages / "docs.jsonl")
    scored = {}
    with open(stages / "scored.jsonl", encoding="utf-8") as fh:
        for line in fh:
            rec = json.loads(line)
            scored[rec["uid"]] = SentimentResult.from_record(rec)
    zones = ZoneConfig.from_geojson(FIXTURES / "zones.geojson")
    tz = json.loads((FIXTURES / "config.json").read_text())["tz_offset"]

    whole = aggregate_bins(docs, scored, zones, tz)
    merged = BinTable()
    for shard in (docs[i::4] for i in range(4)):
        merged = merged.merge(aggregate_bins(shard, scored, zones, tz).bins)
    merge_ok = merged == whole.bins

    rush = whole.bins.dimension("rush")
    partition_ok = sum(b.count for b in rush.values()) == len(docs)

    # 14:00 UTC is 09:00 at UTC-5; 13:59:59 UTC is 08:59:59
    nine = bin_temporal(datetime(2022, 3, 1, 14, 0, 0, tzinfo=timezone.utc), -300)
    before = bin_temporal(datetime(2022, 3, 1, 13, 59, 59, tzinfo=timezone.utc), -300)
    boundary_ok = nine.hour == 9 and not nine.rush and before.hour == 8 and before.rush

    ok = merge_ok and partition_ok and boundary_ok
    criterion.record(
        7, "shard-merge bit-exact, rush partition, 09:00 non-rush", ok,
        f"merge {merge_ok}, partition {sum(b.count for b in rush.values())}/{len(docs)}, boundary {boundary_ok}",
    )
    assert ok


# ---------------------------------------------------------------- AC8


def _diff(a: Path, b: Path) -> list[str]:
    return [name for name in BUNDLE if not filecmp.cmp(a / name, b / name, shallow=False)]


def test_ac8_end_to_end_determinism(criterion, fixture_run, tmp_path):
    start = time.perf_counter()
    second = tmp_path / "run_b"
    _run_all(second)
    elapsed = time.perf_counter() - start
    n_posts = sum(1 for _ in open(FIXTURES / "synthetic_posts.jsonl", encoding="utf-8"))
    rerun_diff = _diff(fixture_run, second)
    golden_diff = _diff(fixture_run, GOLDEN) if GOLDEN.is_dir() else ["(no goldens)"]
    ok = n_posts == 500 and not rerun_diff and not golden_diff and elapsed < 120
    criterion.record(
        8, "run all twice byte-identical and equal to goldens", ok,
        f"{n_posts} posts, rerun diff {rerun_diff or 'none'}, golden diff {golden_diff or 'none'}, {elapsed:.1f} s",
    )
    assert ok


# ---------------------------------------------------------------- AC9


def _header(path: Path) -> list[str]:
    with open(path, encoding="utf-8", newline="") as fh:
        return next(csv.reader(fh))


def test_ac9_golden_table_shapes(criterion):
    expected = {
        DISTRIBUTION_CSV: list(DistributionTable.COLUMNS),
        TOPICS_CSV: TOPIC_COLUMNS,
        SPATIAL_CSV: SPATIAL_COLUMNS,
        TEMPORAL_CSV: TEMPORAL_COLUMNS,
        HISTOGRAM_CSV: HISTOGRAM_COLUMNS,
    }
    problems = [name for name, cols in expected.items() if _header(GOLDEN / name) != cols]

    with open(GOLDEN / DISTRIBUTION_CSV, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    if [r["platform"] for r in rows][-1] != "Combined":
        problems.append("distribution: no Combined row")
    for r in rows:
        pct = [r["negative_pct"], r["neutral_pct"], r["positive_pct"]]
        if any(len(p.split(".")[1]) != 1 for p in pct) or len(r["mean_score"].split(".")[1]) != 3:
            problems.append(f"distribution: bad precision in {r['platform']}")
        if abs(sum(map(float, pct)) - 100) > 0.1:
            problems.append(f"distribution: {r['platform']} percentages do not sum to 100")

    with open(GOLDEN / SPATIAL_CSV, encoding="utf-8", newline="") as fh:
        labels = {r["label"] for r in csv.DictReader(fh)}
    for label in ("Commercial Areas", "Highway Locations", "Major Roads", "Residential Areas", "Urban Core"):
        if label not in labels:
            problems.append(f"spatial: missing {label}")

    ttest = json.loads((GOLDEN / "ttest.json").read_text())
    if not {"t", "df", "p_two_sided", "p_one_sided_less", "n", "mean", "sd"} <= ttest.keys():
        problems.append("ttest: missing fields")

    ok = not problems
    criterion.record(9, "golden tables have the fixed table schemas", ok, "; ".join(problems) or "5 tables + t-test")
    assert ok
