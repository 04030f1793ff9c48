"""API-domain taxonomy: map qualified API names to skill labels.

The taxonomy is data, not code: a CSV of ``prefix,label`` rows where a
prefix matches a qualified name only on separator boundaries (``.`` or
``/``) and the longest matching prefix wins. The package ships a reference
file covering 31 domain labels; deployments can supply their own.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import DuplicatePrefix, EmptyLabel, MissingFileContent
from .imports import ApiImport, extract_imports, language_for_path
from .links import LinkedDataset
from .snapshot import Issue, ProjectSnapshot

_SEPARATORS = (".", "/")


@dataclass(frozen=True)
class ApiTaxonomy:
    entries: dict[str, str]  # prefix -> label
    label_universe: tuple[str, ...]  # distinct labels, first-appearance order

    def __post_init__(self):
        unknown = set(self.entries.values()) - set(self.label_universe)
        if unknown:
            raise ValueError(f"labels missing from universe: {sorted(unknown)}")


def load_taxonomy(path: str | Path) -> ApiTaxonomy:
    """Parse a taxonomy CSV (header ``prefix,label``, # comments allowed)."""
    lines = Path(path).read_text("utf-8").splitlines()
    entries: dict[str, str] = {}
    universe: list[str] = []
    header_seen = False
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        row = next(csv.reader([line]))
        if not header_seen:
            if [c.strip() for c in row[:2]] != ["prefix", "label"]:
                raise EmptyLabel(lineno, "first data line must be the header 'prefix,label'")
            header_seen = True
            continue
        prefix = row[0].strip().strip("./") if row else ""
        label = row[1].strip() if len(row) > 1 else ""
        if not prefix:
            raise EmptyLabel(lineno, "empty prefix")
        if not label:
            raise EmptyLabel(lineno)
        if "," in label:
            raise EmptyLabel(lineno, f"label {label!r} must not contain commas")
        if prefix in entries:
            raise DuplicatePrefix(prefix, lineno)
        entries[prefix] = label
        if label not in universe:
            universe.append(label)
    if not header_seen:
        raise EmptyLabel(0, "taxonomy file has no header line")
    return ApiTaxonomy(entries=entries, label_universe=tuple(universe))


def reference_taxonomy_path() -> Path:
    return Path(str(resources.files("gimli.data").joinpath("taxonomy.csv")))


def load_reference_taxonomy() -> ApiTaxonomy:
    return load_taxonomy(reference_taxonomy_path())


def _prefix_matches(prefix: str, name: str) -> bool:
    if name == prefix:
        return True
    return name.startswith(prefix) and name[len(prefix)] in _SEPARATORS


def label_for_name(taxonomy: ApiTaxonomy, qualified_name: str) -> str | None:
    """Label of the longest separator-aligned prefix, or None."""
    best: str | None = None
    best_len = -1
    for prefix, label in taxonomy.entries.items():
        if len(prefix) > best_len and _prefix_matches(prefix, qualified_name):
            best = label
            best_len = len(prefix)
    return best


def map_to_domains(imports: list[ApiImport], taxonomy: ApiTaxonomy) -> frozenset[str]:
    """Union of labels matched by the imports; unmatched imports contribute nothing."""
    labels = set()
    for imp in imports:
        label = label_for_name(taxonomy, imp.qualified_name)
        if label is not None:
            labels.add(label)
    return frozenset(labels)


@dataclass
class LabeledDataset:
    """Training examples: issues with the domain labels of their fixes."""

    examples: list[tuple[Issue, frozenset[str]]]
    label_universe: tuple[str, ...]
    dropped_zero_label: int = 0
    summary: dict = field(default_factory=dict)


def labels_for_dataset(
    dataset: LinkedDataset,
    snapshot: ProjectSnapshot,
    taxonomy: ApiTaxonomy,
) -> LabeledDataset:
    """Label each linked issue by the imports of its fixing PRs' files.

    Issues whose label set comes out empty carry no supervision signal;
    they are dropped and counted.
    """
    examples = []
    dropped = 0
    for issue, issue_links in dataset.examples:
        labels: set[str] = set()
        for link in issue_links:
            for path in link.source_files:
                if path not in snapshot.file_contents:
                    raise MissingFileContent(path)
                language = language_for_path(path)
                if language is None:
                    continue
                imports = extract_imports(snapshot.file_contents[path], language)
                labels.update(map_to_domains(imports, taxonomy))
        if labels:
            examples.append((issue, frozenset(labels)))
        else:
            dropped += 1
    return LabeledDataset(
        examples=examples,
        label_universe=taxonomy.label_universe,
        dropped_zero_label=dropped,
        summary=dataset.summary.to_dict(),
    )
