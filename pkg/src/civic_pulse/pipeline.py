"""Stage runner. Each stage reads its upstream artifacts from
``<output_dir>/stages/`` and writes only its own, so any stage can be re-run
on its own once its inputs exist.

    stage            needs                                 writes
    ingest           (config inputs)                       posts.jsonl rejects.jsonl docs.jsonl
    score            posts.jsonl                           scored.jsonl
    topics           docs.jsonl scored.jsonl               model.json doc_topics.jsonl topics.csv
    spatiotemporal   docs.jsonl scored.jsonl doc_topics    spatial.csv temporal.csv
                                                           temporal_summary.csv points.geojson
    stats            scored.jsonl                          distribution.csv ttest.json histogram.csv
    report           every file above                      bundle files + manifest.json in output_dir
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

from . import __version__
from . import report as R
from .config import PipelineConfig
from .ingest import clean_corpus, filter_relevant, load_posts, read_posts_jsonl, write_posts_jsonl, write_rejects
from .preprocess import (
    default_stopwords,
    load_lemma_exceptions,
    load_stopwords,
    preprocess_posts,
    read_docs_jsonl,
    write_docs_jsonl,
)
from .sentiment import SentimentResult, default_lexicon, load_lexicon, score_text
from .spatiotemporal import LocationType, ZoneConfig, aggregate_bins, spatial_rows, temporal_rows, temporal_summary_rows
from .stats import DegenerateSampleError, distribution_table, one_sample_ttest
from .topics import build_dtm, select_num_topics, topic_sentiment_table

log = logging.getLogger(__name__)

STAGES = ("ingest", "score", "topics", "spatiotemporal", "stats", "report")

POSTS = "posts.jsonl"
REJECTS = "rejects.jsonl"
DOCS = "docs.jsonl"
SCORED = "scored.jsonl"
DOC_TOPICS = "doc_topics.jsonl"

NEEDS = {
    "ingest": (),
    "score": (POSTS,),
    "topics": (DOCS, SCORED),
    "spatiotemporal": (DOCS, SCORED, DOC_TOPICS),
    "stats": (SCORED,),
    "report": (
        R.DISTRIBUTION_CSV,
        R.TTEST_JSON,
        R.HISTOGRAM_CSV,
        R.TOPICS_CSV,
        R.MODEL_JSON,
        R.SPATIAL_CSV,
        R.TEMPORAL_CSV,
        R.TEMPORAL_SUMMARY_CSV,
        R.POINTS_GEOJSON,
    ),
}


class MissingArtifactError(RuntimeError):
    pass


class Pipeline:
    def __init__(self, config: PipelineConfig, output_dir: Path | None = None, threads: int = 1):
        self.config = config
        self.output_dir = Path(output_dir or config.output_dir)
        self.stage_dir = self.output_dir / "stages"
        self.threads = max(1, threads)

    # -- helpers

    def _path(self, name: str) -> Path:
        return self.stage_dir / name

    def _require(self, stage: str) -> None:
        missing = [n for n in NEEDS[stage] if not self._path(n).is_file()]
        if missing:
            raise MissingArtifactError(
                f"missing upstream artifact for '{stage}': " + ", ".join(str(self._path(n)) for n in missing)
            )

    def _write_text(self, name: str, text: str) -> None:
        self.stage_dir.mkdir(parents=True, exist_ok=True)
        with open(self._path(name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)

    def _read_scored(self) -> dict[str, SentimentResult]:
        out = {}
        with open(self._path(SCORED), encoding="utf-8") as fh:
            for line in fh:
                rec = json.loads(line)
                out[rec["uid"]] = SentimentResult.from_record(rec)
        return out

    def _read_scored_records(self) -> list[dict]:
        with open(self._path(SCORED), encoding="utf-8") as fh:
            return [json.loads(line) for line in fh]

    # -- stages

    def ingest(self) -> None:
        cfg = self.config
        self.stage_dir.mkdir(parents=True, exist_ok=True)
        self._path(REJECTS).write_text("", encoding="utf-8")
        posts = []
        for f in cfg.inputs:
            loaded = load_posts(f.path, f.format)
            write_rejects(loaded.rejects, self._path(REJECTS), source=f.raw)
            posts.extend(loaded.posts)
        relevant = filter_relevant(posts, cfg.keywords, cfg.bbox)
        cleaned = clean_corpus(relevant)
        log.info("ingest: %d loaded, %d relevant, %d after cleaning", len(posts), len(relevant), len(cleaned))
        write_posts_jsonl(cleaned, self._path(POSTS))

        stopwords = default_stopwords() if cfg.stopwords is None else load_stopwords(cfg.stopwords)
        exceptions = None if cfg.lemma_exceptions is None else load_lemma_exceptions(cfg.lemma_exceptions)
        write_docs_jsonl(preprocess_posts(cleaned, stopwords, exceptions), self._path(DOCS))

    def score(self) -> None:
        self._require("score")
        lexicon = default_lexicon() if self.config.lexicon is None else load_lexicon(self.config.lexicon)
        lines = []
        for post in read_posts_jsonl(self._path(POSTS)):
            rec = {"uid": post.uid, "post_id": post.id, "platform": post.platform.value}
            rec.update(score_text(post.text, lexicon).to_record())
            lines.append(json.dumps(rec, sort_keys=True))
        self._write_text(SCORED, "".join(line + "\n" for line in lines))

    def topics(self) -> None:
        self._require("topics")
        lda = self.config.lda
        docs = read_docs_jsonl(self._path(DOCS))
        dtm = build_dtm(docs, lda.min_df, lda.max_df_frac)
        candidates = [k for k in lda.k_candidates if k <= dtm.counts.sum()]
        model = select_num_topics(
            dtm, candidates, lda.alpha, lda.beta, lda.iters, lda.seed, lda.top_n, self.threads
        )
        log.info("topics: selected K=%d (coherence %.4f); %d doc(s) excluded", model.K, model.coherence, len(dtm.excluded))
        export = model.to_json()
        export["excluded_doc_ids"] = dtm.excluded
        self._write_text(R.MODEL_JSON, R.to_json(export))
        dominant = model.dominant_topics()
        self._write_text(
            DOC_TOPICS,
            "".join(
                json.dumps({"uid": uid, "topic_id": int(k)}, sort_keys=True) + "\n"
                for uid, k in zip(model.doc_ids, dominant)
            ),
        )
        rows = topic_sentiment_table(model, self._read_scored(), self.config.themes)
        self._write_text(R.TOPICS_CSV, R.topics_csv(rows))

    def spatiotemporal(self) -> None:
        self._require("spatiotemporal")
        cfg = self.config
        if cfg.zones is not None:
            zones = ZoneConfig.from_geojson(cfg.zones, cfg.default_location_type)
        else:
            default = cfg.default_location_type
            zones = ZoneConfig(default_type=LocationType(default) if default else None)
        with open(self._path(DOC_TOPICS), encoding="utf-8") as fh:
            topics = {rec["uid"]: rec["topic_id"] for rec in map(json.loads, fh)}
        agg = aggregate_bins(read_docs_jsonl(self._path(DOCS)), self._read_scored(), zones, cfg.tz_offset, topics)
        self._write_text(R.SPATIAL_CSV, R.to_csv(R.SPATIAL_COLUMNS, spatial_rows(agg.bins)))
        self._write_text(R.TEMPORAL_CSV, R.to_csv(R.TEMPORAL_COLUMNS, temporal_rows(agg.bins)))
        self._write_text(
            R.TEMPORAL_SUMMARY_CSV, R.to_csv(R.TEMPORAL_SUMMARY_COLUMNS, temporal_summary_rows(agg.bins))
        )
        self._write_text(R.POINTS_GEOJSON, R.to_json(agg.geojson()))

    def stats(self) -> None:
        self._require("stats")
        records = self._read_scored_records()
        results = [(r["platform"], SentimentResult.from_record(r)) for r in records]
        self._write_text(R.DISTRIBUTION_CSV, R.distribution_csv(distribution_table(results)))
        compounds = [r["compound"] for r in records]
        try:
            ttest = one_sample_ttest(compounds, 0.0).to_record()
        except DegenerateSampleError as exc:
            ttest = {"error": str(exc), "n": len(compounds)}
        self._write_text(R.TTEST_JSON, R.to_json(ttest))
        self._write_text(R.HISTOGRAM_CSV, R.histogram_csv(R.build_histogram(compounds, self.config.bin_width)))

    def report(self) -> None:
        self._require("report")
        text = {name: self._path(name).read_text(encoding="utf-8") for name in NEEDS["report"]}
        bundle = R.ReportBundle(
            distribution_table=text[R.DISTRIBUTION_CSV],
            topic_table=text[R.TOPICS_CSV],
            spatial_table=text[R.SPATIAL_CSV],
            temporal_table=text[R.TEMPORAL_CSV],
            histogram=text[R.HISTOGRAM_CSV],
            geojson=json.loads(text[R.POINTS_GEOJSON]),
            manifest=self.manifest(),
            extras={n: text[n] for n in (R.TTEST_JSON, R.TEMPORAL_SUMMARY_CSV, R.MODEL_JSON)},
        )
        R.emit_report(bundle, self.output_dir)

    def manifest(self) -> dict:
        cfg = self.config
        inputs = {name: R.sha256_file(path) for name, path in sorted(cfg.referenced_files().items())}
        return {
            "tool": "civic-pulse",
            "version": __version__,
            "seed": cfg.lda.seed,
            "config_sha256": R.sha256_bytes(cfg.raw_bytes),
            "config": cfg.data,
            "inputs": inputs,
        }

    def run(self, stage: str) -> None:
        stages = STAGES if stage == "all" else (stage,)
        for name in stages:
            log.info("stage %s", name)
            getattr(self, name)()
