"""Labeled-dataset files: the bridge between dataset building and training.

A dataset file carries issue text plus ground-truth label sets; it is what
``build-dataset`` writes and ``train``/``evaluate`` read, and what the
optional replication path feeds in from external data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import SchemaViolation, VersionMismatch
from .snapshot import ProjectRef

DATASET_SCHEMA_VERSION = 1


@dataclass
class DatasetExample:
    number: int
    title: str
    body: str
    url: str
    labels: frozenset[str]


@dataclass
class DatasetFile:
    project: ProjectRef | None
    label_universe: tuple[str, ...]
    examples: list[DatasetExample]
    dropped_zero_label: int = 0
    link_summary: dict = field(default_factory=dict)


def save_dataset(dataset: DatasetFile, path: str | Path) -> None:
    doc = {
        "schema_version": DATASET_SCHEMA_VERSION,
        "project": (
            {
                "owner": dataset.project.owner,
                "name": dataset.project.name,
                "display_label": dataset.project.display_label,
            }
            if dataset.project
            else None
        ),
        "label_universe": list(dataset.label_universe),
        "examples": [
            {
                "number": e.number,
                "title": e.title,
                "body": e.body,
                "url": e.url,
                "labels": sorted(e.labels),
            }
            for e in dataset.examples
        ],
        "dropped_zero_label": dataset.dropped_zero_label,
        "link_summary": dataset.link_summary,
    }
    Path(path).write_text(json.dumps(doc, indent=2), "utf-8")


def load_dataset(path: str | Path) -> DatasetFile:
    try:
        doc = json.loads(Path(path).read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaViolation("", f"not valid JSON: {exc}") from exc
    version = doc.get("schema_version")
    if version != DATASET_SCHEMA_VERSION:
        raise VersionMismatch(version, DATASET_SCHEMA_VERSION)
    for key in ("label_universe", "examples"):
        if key not in doc:
            raise SchemaViolation(f"/{key}", "missing required field")
    project = ProjectRef(**doc["project"]) if doc.get("project") else None
    examples = [
        DatasetExample(
            number=e["number"],
            title=e["title"],
            body=e["body"],
            url=e.get("url", ""),
            labels=frozenset(e["labels"]),
        )
        for e in doc["examples"]
    ]
    return DatasetFile(
        project=project,
        label_universe=tuple(doc["label_universe"]),
        examples=examples,
        dropped_zero_label=doc.get("dropped_zero_label", 0),
        link_summary=doc.get("link_summary", {}),
    )
