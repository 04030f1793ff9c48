"""Single-file relational store for classified issues and the project catalog.

Schema (see docs/store-schema.md): ``projects`` holds the catalog,
``classified_issues`` one row per (project, issue number, model_id).
Classification batches are written in one transaction: readers never see a
partially replaced batch, and rows for issues that are no longer open do not
survive a completed run.
"""

from __future__ import annotations

import json
import sqlite3
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from .errors import StoreUnavailable, UnknownProject
from .snapshot import format_timestamp, parse_timestamp

_SCHEMA = """
CREATE TABLE IF NOT EXISTS projects (
    display_label TEXT PRIMARY KEY,
    owner TEXT NOT NULL,
    name TEXT NOT NULL,
    label_universe TEXT NOT NULL,  -- JSON array
    model_id TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS classified_issues (
    project TEXT NOT NULL,
    number INTEGER NOT NULL,
    model_id TEXT NOT NULL,
    title TEXT NOT NULL,
    body TEXT NOT NULL,
    url TEXT NOT NULL,
    labels TEXT NOT NULL,          -- JSON array
    classified_at TEXT NOT NULL,
    PRIMARY KEY (project, number, model_id)
);
"""


@dataclass(frozen=True)
class ClassifiedIssue:
    project: str  # display label
    number: int
    title: str
    body: str
    url: str
    labels: frozenset[str]
    model_id: str
    classified_at: datetime


@dataclass(frozen=True)
class CatalogEntry:
    display_label: str
    owner: str
    name: str
    label_universe: tuple[str, ...]
    model_id: str


class IssueStore:
    def __init__(self, path: str | Path):
        self.path = str(path)
        with self._connect() as conn:
            conn.executescript(_SCHEMA)

    def _connect(self) -> sqlite3.Connection:
        try:
            conn = sqlite3.connect(self.path, timeout=30.0)
        except sqlite3.Error as exc:
            raise StoreUnavailable(f"cannot open store at {self.path}: {exc}") from exc
        conn.execute("PRAGMA journal_mode=WAL")
        return conn

    # -- catalog ---------------------------------------------------------

    def add_project(self, entry: CatalogEntry) -> None:
        # upsert: re-registering on service restart refreshes the catalog row;
        # duplicate registration within a process is caught by the registry
        with self._connect() as conn:
            conn.execute(
                "INSERT OR REPLACE INTO projects VALUES (?, ?, ?, ?, ?)",
                (
                    entry.display_label,
                    entry.owner,
                    entry.name,
                    json.dumps(list(entry.label_universe)),
                    entry.model_id,
                ),
            )

    def projects(self) -> list[CatalogEntry]:
        with self._connect() as conn:
            rows = conn.execute(
                "SELECT display_label, owner, name, label_universe, model_id"
                " FROM projects ORDER BY display_label"
            ).fetchall()
        return [
            CatalogEntry(r[0], r[1], r[2], tuple(json.loads(r[3])), r[4]) for r in rows
        ]

    def project(self, display_label: str) -> CatalogEntry:
        for entry in self.projects():
            if entry.display_label == display_label:
                return entry
        raise UnknownProject(display_label)

    # -- classifications ---------------------------------------------------

    def replace_classifications(
        self, display_label: str, model_id: str, rows: list[ClassifiedIssue]
    ) -> int:
        """Atomically replace the project's rows with the new batch.

        Equivalent to upsert-plus-delete: rows for issues absent from the
        batch (closed since the last run) are gone afterwards.
        """
        with self._connect() as conn:
            conn.execute(
                "DELETE FROM classified_issues WHERE project = ? AND model_id = ?",
                (display_label, model_id),
            )
            conn.executemany(
                "INSERT INTO classified_issues VALUES (?, ?, ?, ?, ?, ?, ?, ?)",
                [
                    (
                        display_label,
                        row.number,
                        model_id,
                        row.title,
                        row.body,
                        row.url,
                        json.dumps(sorted(row.labels)),
                        format_timestamp(row.classified_at),
                    )
                    for row in rows
                ],
            )
        return len(rows)

    def classified_issues(
        self, display_label: str, model_id: str | None = None
    ) -> list[ClassifiedIssue]:
        sql = (
            "SELECT project, number, model_id, title, body, url, labels, classified_at"
            " FROM classified_issues WHERE project = ?"
        )
        params: tuple = (display_label,)
        if model_id is not None:
            sql += " AND model_id = ?"
            params += (model_id,)
        sql += " ORDER BY number"
        with self._connect() as conn:
            rows = conn.execute(sql, params).fetchall()
        return [
            ClassifiedIssue(
                project=r[0],
                number=r[1],
                model_id=r[2],
                title=r[3],
                body=r[4],
                url=r[5],
                labels=frozenset(json.loads(r[6])),
                classified_at=parse_timestamp(r[7]),
            )
            for r in rows
        ]
