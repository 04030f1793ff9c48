"""Term weighting for cleaned issue text.

Weights use the smoothed inverse-document-frequency variant
``idf(t) = ln((1 + n_docs) / (1 + df(t))) + 1`` and every non-empty
transformed vector is L2-normalized, so duplicating all tokens in a
document leaves its vector unchanged.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass

from .errors import EmptyVocabulary, SchemaViolation, VersionMismatch
from .text import CleaningConfig

TFIDF_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class FeatureVector:
    """Sparse vector: strictly increasing indices, parallel weights."""

    indices: tuple[int, ...]
    weights: tuple[float, ...]
    dimension: int

    def __post_init__(self):
        if len(self.indices) != len(self.weights):
            raise ValueError("indices and weights must be parallel")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be strictly increasing")
        if self.indices and not 0 <= self.indices[-1] < self.dimension:
            raise ValueError("index out of range")

    def norm(self) -> float:
        return math.sqrt(sum(w * w for w in self.weights))

    def to_dense(self) -> list[float]:
        dense = [0.0] * self.dimension
        for i, w in zip(self.indices, self.weights):
            dense[i] = w
        return dense


@dataclass(frozen=True)
class TfidfModel:
    vocabulary: dict[str, int]  # term -> column, lexicographic order
    idf: tuple[float, ...]
    config: CleaningConfig
    n_docs: int
    min_df: int

    @property
    def dimension(self) -> int:
        return len(self.vocabulary)


def fit_tfidf(
    token_lists: list[list[str]],
    min_df: int = 2,
    config: CleaningConfig | None = None,
) -> TfidfModel:
    """Fit vocabulary and idf over the given documents.

    Vocabulary keeps terms with document frequency >= min_df, in
    lexicographic order. Raises EmptyVocabulary if nothing survives.
    """
    if not token_lists:
        raise ValueError("need at least one document")
    if min_df < 1:
        raise ValueError("min_df must be positive")
    if config is None:
        config = CleaningConfig()

    df: Counter[str] = Counter()
    for tokens in token_lists:
        df.update(set(tokens))

    terms = sorted(t for t, c in df.items() if c >= min_df)
    if not terms:
        raise EmptyVocabulary(
            f"no term reaches document frequency {min_df} over {len(token_lists)} docs"
        )
    n = len(token_lists)
    idf = tuple(math.log((1 + n) / (1 + df[t])) + 1.0 for t in terms)
    return TfidfModel(
        vocabulary={t: i for i, t in enumerate(terms)},
        idf=idf,
        config=config,
        n_docs=n,
        min_df=min_df,
    )


def transform(model: TfidfModel, tokens: list[str]) -> FeatureVector:
    """Weight tokens by count * idf, then L2-normalize.

    Out-of-vocabulary tokens are ignored; all-OOV input gives the zero
    vector.
    """
    counts = Counter(tokens)
    pairs = []
    for term, count in counts.items():
        col = model.vocabulary.get(term)
        if col is not None:
            pairs.append((col, count * model.idf[col]))
    if not pairs:
        return FeatureVector((), (), model.dimension)
    pairs.sort()
    norm = math.sqrt(sum(w * w for _, w in pairs))
    return FeatureVector(
        indices=tuple(i for i, _ in pairs),
        weights=tuple(w / norm for _, w in pairs),
        dimension=model.dimension,
    )


def save_tfidf(model: TfidfModel) -> bytes:
    """Canonical JSON bytes; identical models serialize identically."""
    doc = {
        "schema_version": TFIDF_SCHEMA_VERSION,
        "vocabulary": model.vocabulary,
        "idf": list(model.idf),
        "n_docs": model.n_docs,
        "min_df": model.min_df,
        "config_digest": model.config.digest(),
        "config": {
            "stopwords": sorted(model.config.stopwords),
            "template_lines": sorted(model.config.template_lines),
        },
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")


def load_tfidf(raw: bytes) -> TfidfModel:
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaViolation("", f"not a valid model document: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaViolation("", "model document must be a JSON object")
    version = doc.get("schema_version")
    if version != TFIDF_SCHEMA_VERSION:
        raise VersionMismatch(version, TFIDF_SCHEMA_VERSION)
    for key in ("vocabulary", "idf", "n_docs", "min_df", "config"):
        if key not in doc:
            raise SchemaViolation(f"/{key}", "missing required field")
    config = CleaningConfig(
        stopwords=frozenset(doc["config"]["stopwords"]),
        template_lines=frozenset(doc["config"]["template_lines"]),
    )
    model = TfidfModel(
        vocabulary={t: int(i) for t, i in doc["vocabulary"].items()},
        idf=tuple(float(x) for x in doc["idf"]),
        config=config,
        n_docs=int(doc["n_docs"]),
        min_df=int(doc["min_df"]),
    )
    if len(model.idf) != len(model.vocabulary):
        raise SchemaViolation("/idf", "idf length must match vocabulary size")
    if doc.get("config_digest") not in (None, config.digest()):
        raise SchemaViolation("/config_digest", "config digest does not match config")
    return model
