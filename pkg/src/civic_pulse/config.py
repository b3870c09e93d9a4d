"""Pipeline configuration: JSON file validated against ``data/config.schema.json``.

Relative paths resolve against the config file's directory. The lexicon,
stopword and lemma-exception entries accept the value ``"bundled"`` for the
tables shipped with the package.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from .ingest import BoundingBox, KeywordSet

BUNDLED = "bundled"


class ConfigError(ValueError):
    """Invalid configuration; ``problems`` holds one message per defect."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("; ".join(problems))


def schema() -> dict:
    text = (resources.files("civic_pulse") / "data" / "config.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


@dataclass(frozen=True)
class LdaConfig:
    seed: int
    k_candidates: tuple[int, ...] = (4, 5, 6, 7, 8)
    alpha: float | None = None
    beta: float = 0.01
    iters: int = 1000
    min_df: int = 2
    max_df_frac: float = 0.5
    top_n: int = 10


@dataclass(frozen=True)
class InputFile:
    path: Path
    format: str
    raw: str  # as written in the config, for the manifest


@dataclass(frozen=True)
class PipelineConfig:
    source: Path
    raw_bytes: bytes
    data: dict
    inputs: tuple[InputFile, ...]
    keywords: KeywordSet
    bbox: BoundingBox | None
    lexicon: Path | None
    stopwords: Path | None
    lemma_exceptions: Path | None
    zones: Path | None
    default_location_type: str | None
    lda: LdaConfig
    tz_offset: int
    bin_width: float
    themes: dict[int, str]
    output_dir: Path
    thresholds: tuple[float, float] = (-0.05, 0.05)

    def referenced_files(self) -> dict[str, Path]:
        """Config-relative name -> resolved path for every input file the run reads."""
        out = {f.raw: f.path for f in self.inputs}
        for key in ("lexicon", "stopwords", "lemma_exceptions", "zones"):
            value = self.data.get(key)
            if value and value != BUNDLED:
                out[value] = getattr(self, key)
        return out


def _resolve(base: Path, value: str | None) -> Path | None:
    if value is None or value == BUNDLED:
        return None
    p = Path(value)
    return p if p.is_absolute() else base / p


def _field_name(err: jsonschema.ValidationError) -> str:
    path = ".".join(str(p) for p in err.absolute_path)
    return path or "(root)"


def parse_config(data: Any, source: Path, raw_bytes: bytes = b"") -> PipelineConfig:
    validator = jsonschema.Draft202012Validator(schema())
    problems = [
        f"{_field_name(e)}: {e.message}" for e in sorted(validator.iter_errors(data), key=lambda e: list(e.path))
    ]
    if problems:
        raise ConfigError(problems)

    base = source.parent
    inputs = tuple(InputFile(_resolve(base, i["path"]), i["format"], i["path"]) for i in data["inputs"])
    for f in inputs:
        if not f.path.is_file():
            problems.append(f"inputs: file not found: {f.raw}")
    paths = {}
    for key in ("lexicon", "stopwords", "lemma_exceptions", "zones"):
        paths[key] = _resolve(base, data.get(key))
        if paths[key] is not None and not paths[key].is_file():
            problems.append(f"{key}: file not found: {data[key]}")

    bbox = None
    if data.get("bbox"):
        try:
            bbox = BoundingBox(**data["bbox"])
        except ValueError as exc:
            problems.append(f"bbox: {exc}")
    try:
        keywords = KeywordSet.from_phrases(data["keywords"])
    except ValueError as exc:
        problems.append(f"keywords: {exc}")
    bin_width = data.get("histogram", {}).get("bin_width", 0.1)
    n_bins = 2 / bin_width
    if abs(n_bins - round(n_bins)) > 1e-9:
        problems.append(f"histogram.bin_width: {bin_width} does not divide [-1, 1] evenly")
    if problems:
        raise ConfigError(problems)

    lda_data = dict(data["lda"])
    if "k_candidates" in lda_data:
        lda_data["k_candidates"] = tuple(lda_data["k_candidates"])
    return PipelineConfig(
        source=source,
        raw_bytes=raw_bytes,
        data=data,
        inputs=inputs,
        keywords=keywords,
        bbox=bbox,
        lexicon=paths["lexicon"],
        stopwords=paths["stopwords"],
        lemma_exceptions=paths["lemma_exceptions"],
        zones=paths["zones"],
        default_location_type=data.get("default_location_type"),
        lda=LdaConfig(**lda_data),
        tz_offset=data["tz_offset"],
        bin_width=bin_width,
        themes={int(k): v for k, v in data.get("themes", {}).items()},
        output_dir=_resolve(base, data["output_dir"]),
    )


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError([f"config: cannot read {path}: {exc.strerror or exc}"]) from None
    try:
        data = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError([f"config: not valid JSON: {exc}"]) from None
    return parse_config(data, path, raw)
