"""Report bundle assembly: plot-ready tables, GeoJSON and a run manifest.

Everything is serialized deterministically (fixed column order, LF line
endings, sorted JSON keys, no timestamps), so identical inputs give a
byte-identical bundle.
"""

from __future__ import annotations

import bisect
import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .spatiotemporal import Aggregation, spatial_rows, temporal_rows, temporal_summary_rows
from .stats import DistributionTable, TTestResult
from .topics import TopicSentimentRow, rounded_shares

DISTRIBUTION_CSV = "distribution.csv"
TOPICS_CSV = "topics.csv"
SPATIAL_CSV = "spatial.csv"
TEMPORAL_CSV = "temporal.csv"
HISTOGRAM_CSV = "histogram.csv"
POINTS_GEOJSON = "points.geojson"
MANIFEST_JSON = "manifest.json"
# supplementary outputs alongside the fixed set above
TTEST_JSON = "ttest.json"
TEMPORAL_SUMMARY_CSV = "temporal_summary.csv"
MODEL_JSON = "model.json"

TOPIC_COLUMNS = ["topic", "top_keywords", "theme", "documents", "share_pct", "avg_sentiment"]
SPATIAL_COLUMNS = ["location_type", "label", "count", "mean_sentiment"]
TEMPORAL_COLUMNS = ["weekday", "hour", "rush", "count", "mean_sentiment"]
TEMPORAL_SUMMARY_COLUMNS = ["dimension", "key", "count", "mean_sentiment"]
HISTOGRAM_COLUMNS = ["bin_lower", "bin_upper", "count"]


class ReportWriteError(OSError):
    pass


# ---------------------------------------------------------------- histogram


@dataclass(frozen=True)
class HistogramBin:
    lower: float
    upper: float
    count: int


def histogram_edges(bin_width: float) -> list[float]:
    if not 0 < bin_width <= 2:
        raise ValueError(f"bin width {bin_width} outside (0, 2]")
    n = round(2 / bin_width)
    if abs(2 / bin_width - n) > 1e-9:
        raise ValueError(f"bin width {bin_width} does not divide [-1, 1] evenly")
    # rounding keeps edges like 0.3 equal to the literal a user would compare against
    return [round(-1.0 + i * bin_width, 12) for i in range(n)] + [1.0]


def build_histogram(compounds: Iterable[float], bin_width: float) -> list[HistogramBin]:
    """Uniform bins over [-1, 1]; right-open except the last, which includes 1."""
    edges = histogram_edges(bin_width)
    counts = [0] * (len(edges) - 1)
    for x in compounds:
        if not -1.0 <= x <= 1.0:
            raise ValueError(f"compound {x} outside [-1, 1]")
        i = min(bisect.bisect_right(edges, x) - 1, len(counts) - 1)
        counts[i] += 1
    return [HistogramBin(edges[i], edges[i + 1], c) for i, c in enumerate(counts)]


# ---------------------------------------------------------------- serialization


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False) + "\n"


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def distribution_csv(table: DistributionTable) -> str:
    return to_csv(DistributionTable.COLUMNS, table.records())


def topics_csv(rows: Sequence[TopicSentimentRow]) -> str:
    shares = rounded_shares(rows) if sum(r.doc_count for r in rows) else [0.0] * len(rows)
    return to_csv(
        TOPIC_COLUMNS,
        (
            [
                r.topic_id,
                ", ".join(r.top_keywords),
                r.theme,
                r.doc_count,
                f"{share:.1f}",
                "" if r.avg_compound is None else f"{r.avg_compound:.3f}",
            ]
            for r, share in zip(rows, shares)
        ),
    )


def histogram_csv(bins: Sequence[HistogramBin]) -> str:
    return to_csv(HISTOGRAM_COLUMNS, ([repr(b.lower), repr(b.upper), b.count] for b in bins))


def ttest_json(result: TTestResult) -> str:
    return to_json(result.to_record())


# ---------------------------------------------------------------- bundle


@dataclass
class ReportBundle:
    distribution_table: str
    topic_table: str
    spatial_table: str
    temporal_table: str
    histogram: str
    geojson: dict
    manifest: dict = field(default_factory=dict)
    extras: dict[str, str] = field(default_factory=dict)

    def files(self) -> dict[str, str]:
        out = {
            DISTRIBUTION_CSV: self.distribution_table,
            TOPICS_CSV: self.topic_table,
            SPATIAL_CSV: self.spatial_table,
            TEMPORAL_CSV: self.temporal_table,
            HISTOGRAM_CSV: self.histogram,
            POINTS_GEOJSON: to_json(self.geojson),
        }
        out.update(self.extras)
        return dict(sorted(out.items()))


def build_bundle(
    distribution: DistributionTable,
    ttest: TTestResult | None,
    topic_rows: Sequence[TopicSentimentRow],
    aggregation: Aggregation,
    compounds: Sequence[float],
    bin_width: float,
    manifest: dict | None = None,
) -> ReportBundle:
    """Assemble a bundle from in-memory module outputs."""
    extras = {
        TEMPORAL_SUMMARY_CSV: to_csv(TEMPORAL_SUMMARY_COLUMNS, temporal_summary_rows(aggregation.bins)),
    }
    if ttest is not None:
        extras[TTEST_JSON] = ttest_json(ttest)
    return ReportBundle(
        distribution_table=distribution_csv(distribution),
        topic_table=topics_csv(topic_rows),
        spatial_table=to_csv(SPATIAL_COLUMNS, spatial_rows(aggregation.bins)),
        temporal_table=to_csv(TEMPORAL_COLUMNS, temporal_rows(aggregation.bins)),
        histogram=histogram_csv(build_histogram(compounds, bin_width)),
        geojson=aggregation.geojson(),
        manifest=dict(manifest or {}),
        extras=extras,
    )


def _write(path: Path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ReportWriteError(f"cannot write {path}: {exc.strerror or exc}") from exc


def emit_report(bundle: ReportBundle, out_dir: str | Path) -> ReportBundle:
    """Write every bundle file to ``out_dir``; the manifest also records output hashes."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ReportWriteError(f"cannot create {out}: {exc.strerror or exc}") from exc
    files = bundle.files()
    for name, text in files.items():
        _write(out / name, text)
    bundle.manifest["outputs"] = {name: sha256_bytes(text.encode("utf-8")) for name, text in files.items()}
    _write(out / MANIFEST_JSON, to_json(bundle.manifest))
    return bundle
