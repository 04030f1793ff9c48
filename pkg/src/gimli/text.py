"""Issue-text cleaning: turn a title and body into stemmed tokens.

The pipeline order is fixed and load-bearing (templates are matched before
lowercasing, stopwords before stemming):

  1. concatenate ``title + "\\n" + body``
  2. delete fenced code blocks (``` ... ```) and inline backtick spans
  3. delete URLs (``scheme://`` up to the next whitespace)
  4. delete template lines (exact match after whitespace trim)
  5. lowercase
  6. replace every character outside [a-z] and whitespace with a space
  7. split on whitespace
  8. drop stopwords
  9. stem each token (Porter)
  10. drop tokens shorter than 2 characters
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from importlib import resources

from . import porter

URL_PATTERN = re.compile(r"[A-Za-z][A-Za-z0-9+.-]*://\S+")
CODE_FENCE_PATTERN = re.compile(r"```.*?```", re.DOTALL)
INLINE_CODE_PATTERN = re.compile(r"`[^`\n]*`")
_NON_ALPHA = re.compile(r"[^a-z\s]")


def default_stopwords() -> frozenset[str]:
    """The pinned English stopword list shipped with the package."""
    raw = resources.files("gimli.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(
        line.strip()
        for line in raw.splitlines()
        if line.strip() and not line.startswith("#")
    )


@dataclass(frozen=True)
class CleaningConfig:
    """Stopwords plus per-project template lines to strip from issue text."""

    stopwords: frozenset[str] = field(default_factory=default_stopwords)
    template_lines: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        bad = [w for w in self.stopwords if w != w.lower()]
        if bad:
            raise ValueError(f"stopwords must be lowercase: {sorted(bad)[:5]}")
        # template lines are compared after trim, so store them trimmed
        object.__setattr__(
            self, "template_lines", frozenset(t.strip() for t in self.template_lines)
        )

    def digest(self) -> str:
        """Stable fingerprint, stored with fitted models to detect drift."""
        payload = json.dumps(
            {
                "stopwords": sorted(self.stopwords),
                "template_lines": sorted(self.template_lines),
                "url_pattern": URL_PATTERN.pattern,
                "code_fence_pattern": CODE_FENCE_PATTERN.pattern,
            },
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _drop_template_lines(text: str, templates: frozenset[str]) -> str:
    if not templates:
        return text
    kept = [line for line in text.split("\n") if line.strip() not in templates]
    return "\n".join(kept)


def count_template_matches(title: str, body: str, config: CleaningConfig) -> int:
    """How many lines template removal would strip; surfaced for auditing."""
    text = title + "\n" + body
    text = CODE_FENCE_PATTERN.sub(" ", text)
    text = INLINE_CODE_PATTERN.sub(" ", text)
    text = URL_PATTERN.sub(" ", text)
    return sum(1 for line in text.split("\n") if line.strip() in config.template_lines)


def preprocess(title: str, body: str, config: CleaningConfig | None = None) -> list[str]:
    """Clean and stem issue text; returns the token list, possibly empty."""
    if config is None:
        config = CleaningConfig()
    text = title + "\n" + body
    text = CODE_FENCE_PATTERN.sub(" ", text)
    text = INLINE_CODE_PATTERN.sub(" ", text)
    text = URL_PATTERN.sub(" ", text)
    text = _drop_template_lines(text, config.template_lines)
    text = text.lower()
    text = _NON_ALPHA.sub(" ", text)
    tokens = text.split()
    tokens = [t for t in tokens if t not in config.stopwords]
    tokens = [porter.stem(t) for t in tokens]
    return [t for t in tokens if len(t) >= 2]
