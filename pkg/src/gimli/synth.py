"""Deterministic synthetic issue corpus with planted label vocabularies.

Each label owns ten keywords; an issue's ground-truth labels are exactly the
labels whose keywords appear in its text, so a keyword-lookup classifier
scores a perfect 1.0 and bounds what the learned pipeline can achieve. Used
by the end-to-end acceptance run and the demo seeder.
"""

from __future__ import annotations

from dataclasses import dataclass

from .rng import SplitMix64, derive_seed
from .text import CleaningConfig, preprocess

PLANTED_VOCABULARY: dict[str, tuple[str, ...]] = {
    "Rendering": (
        "render", "pixel", "shader", "canvas", "sprite",
        "texture", "viewport", "glyph", "raster", "bitmap",
    ),
    "Storage": (
        "database", "query", "index", "cache", "transaction",
        "schema", "rollback", "journal", "column", "tuple",
    ),
    "Networking": (
        "socket", "packet", "proxy", "handshake", "latency",
        "bandwidth", "gateway", "firewall", "router", "datagram",
    ),
    "Audio": (
        "audio", "playback", "codec", "waveform", "mixer",
        "stereo", "microphone", "decibel", "resample", "loudness",
    ),
    "Security": (
        "login", "password", "token", "oauth", "certificate",
        "encryption", "signature", "credential", "keystore", "nonce",
    ),
}

_FILLER = (
    "window", "button", "click", "slow", "broken", "crash", "open",
    "close", "wrong", "missing", "version", "update", "install", "menu",
    "dialog", "scroll", "freeze", "hang", "blank", "resize",
)

_TEMPLATES = (
    "something went wrong with the {kw}",
    "the {kw} is broken after the update",
    "unexpected behaviour in {kw} handling",
    "please fix the {kw} code path",
    "regression in {kw} since version 3",
)


@dataclass(frozen=True)
class SyntheticIssue:
    number: int
    title: str
    body: str
    labels: frozenset[str]


def planted_stems(config: CleaningConfig | None = None) -> dict[str, frozenset[str]]:
    """Stemmed form of each label's keywords, for keyword-lookup oracles."""
    out = {}
    for label, words in PLANTED_VOCABULARY.items():
        stems = set()
        for word in words:
            tokens = preprocess(word, "", config)
            if len(tokens) != 1:
                raise AssertionError(f"planted keyword {word!r} does not survive cleaning")
            stems.add(tokens[0])
        out[label] = frozenset(stems)
    return out


def generate_corpus(
    n_issues: int = 500, seed: int = 2024
) -> tuple[list[SyntheticIssue], tuple[str, ...]]:
    """Generate issues whose labels are exactly the planted keywords present."""
    labels = tuple(PLANTED_VOCABULARY)
    issues = []
    for i in range(n_issues):
        rng = SplitMix64(derive_seed(seed, "issue", i))
        count = 1 + rng.randbelow(3)
        chosen = [labels[j] for j in sorted(rng.sample_without_replacement(len(labels), count))]
        keywords = []
        for label in chosen:
            vocab = PLANTED_VOCABULARY[label]
            k = 1 + rng.randbelow(3)
            keywords.extend(vocab[j] for j in rng.sample_without_replacement(len(vocab), k))
        filler = [_FILLER[rng.randbelow(len(_FILLER))] for _ in range(3 + rng.randbelow(6))]

        title = _TEMPLATES[rng.randbelow(len(_TEMPLATES))].format(kw=keywords[0])
        body_words = keywords[1:] + filler
        # deterministic shuffle of the body content
        rng.shuffle(body_words)
        sentences = [
            _TEMPLATES[rng.randbelow(len(_TEMPLATES))].format(kw=word)
            for word in body_words
        ]
        body = ". ".join(sentences)
        if rng.randbelow(4) == 0:
            body += "\nsee https://example.com/logs/%d for details" % i
        issues.append(
            SyntheticIssue(
                number=i + 1,
                title=title,
                body=body,
                labels=frozenset(chosen),
            )
        )
    return issues, labels


def keyword_oracle_labels(
    tokens: list[str], stems_by_label: dict[str, frozenset[str]]
) -> frozenset[str]:
    """The independent reference classifier: label <=> planted stem present."""
    present = set(tokens)
    return frozenset(
        label for label, stems in stems_by_label.items() if present & stems
    )
