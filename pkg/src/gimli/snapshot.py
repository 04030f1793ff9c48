"""Mined-project snapshot: domain records and JSON persistence.

A snapshot is the offline unit every downstream stage consumes. The file
format is UTF-8 JSON validated against ``snapshot.schema.json`` (shipped in
the package and mirrored at ``docs/``); timestamps are ISO-8601 UTC strings
at second precision so round-trips are bit-exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import jsonschema

from .errors import SchemaViolation

TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%SZ"

# Default source-file whitelist used when mining file contents.
DEFAULT_SOURCE_EXTENSIONS = (".java", ".cs", ".cpp", ".cc", ".cxx", ".h", ".hpp")


def format_timestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime(TIMESTAMP_FORMAT)


def parse_timestamp(raw: str) -> datetime:
    return datetime.strptime(raw, TIMESTAMP_FORMAT).replace(tzinfo=timezone.utc)


@dataclass(frozen=True)
class ProjectRef:
    owner: str
    name: str
    display_label: str

    def __post_init__(self):
        if not self.owner or not self.name:
            raise ValueError("owner and name must be non-empty")

    @property
    def slug(self) -> str:
        return f"{self.owner}/{self.name}"


@dataclass
class Issue:
    number: int
    title: str
    body: str
    state: str  # "open" | "closed"
    closed_at: datetime | None
    url: str
    comments: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.number < 1:
            raise ValueError("issue number must be positive")
        if self.state not in ("open", "closed"):
            raise ValueError(f"bad issue state {self.state!r}")
        if (self.closed_at is None) == (self.state == "closed"):
            raise ValueError("closed_at must be present iff state is closed")


@dataclass
class PullRequest:
    number: int
    title: str
    body: str
    merged: bool
    changed_files: list[str] = field(default_factory=list)
    commit_messages: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.number < 1:
            raise ValueError("pull request number must be positive")


@dataclass
class ProjectSnapshot:
    project: ProjectRef
    fetched_at: datetime
    issues: list[Issue]
    pulls: list[PullRequest]
    file_contents: dict[str, str]
    source_extensions: tuple[str, ...] = DEFAULT_SOURCE_EXTENSIONS

    def open_issues(self) -> list[Issue]:
        return [i for i in self.issues if i.state == "open"]

    def issue_by_number(self) -> dict[int, Issue]:
        return {i.number: i for i in self.issues}


def _issue_to_dict(issue: Issue) -> dict:
    return {
        "number": issue.number,
        "title": issue.title,
        "body": issue.body,
        "state": issue.state,
        "closed_at": format_timestamp(issue.closed_at) if issue.closed_at else None,
        "url": issue.url,
        "comments": list(issue.comments),
    }


def _pull_to_dict(pr: PullRequest) -> dict:
    return {
        "number": pr.number,
        "title": pr.title,
        "body": pr.body,
        "merged": pr.merged,
        "changed_files": list(pr.changed_files),
        "commit_messages": list(pr.commit_messages),
    }


def snapshot_to_dict(snapshot: ProjectSnapshot) -> dict:
    return {
        "project": {
            "owner": snapshot.project.owner,
            "name": snapshot.project.name,
            "display_label": snapshot.project.display_label,
        },
        "fetched_at": format_timestamp(snapshot.fetched_at),
        "issues": [_issue_to_dict(i) for i in snapshot.issues],
        "pulls": [_pull_to_dict(p) for p in snapshot.pulls],
        "file_contents": dict(snapshot.file_contents),
        "source_extensions": list(snapshot.source_extensions),
    }


def load_schema() -> dict:
    raw = resources.files("gimli.data").joinpath("snapshot.schema.json").read_text("utf-8")
    return json.loads(raw)


def _pointer(error: jsonschema.ValidationError) -> str:
    parts = [str(p) for p in error.absolute_path]
    if error.validator == "required":
        # point at the missing property rather than its parent object
        missing = [p for p in error.validator_value if p not in error.instance]
        if missing:
            parts.append(missing[0])
    return "/" + "/".join(parts) if parts else ""


def validate_snapshot_dict(doc: dict) -> None:
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise SchemaViolation(_pointer(err), err.message)


def snapshot_from_dict(doc: dict) -> ProjectSnapshot:
    validate_snapshot_dict(doc)
    project = ProjectRef(**doc["project"])
    issues = [
        Issue(
            number=i["number"],
            title=i["title"],
            body=i["body"],
            state=i["state"],
            closed_at=parse_timestamp(i["closed_at"]) if i["closed_at"] else None,
            url=i["url"],
            comments=list(i["comments"]),
        )
        for i in doc["issues"]
    ]
    pulls = [
        PullRequest(
            number=p["number"],
            title=p["title"],
            body=p["body"],
            merged=p["merged"],
            changed_files=list(p["changed_files"]),
            commit_messages=list(p["commit_messages"]),
        )
        for p in doc["pulls"]
    ]
    return ProjectSnapshot(
        project=project,
        fetched_at=parse_timestamp(doc["fetched_at"]),
        issues=issues,
        pulls=pulls,
        file_contents=dict(doc["file_contents"]),
        source_extensions=tuple(doc.get("source_extensions", DEFAULT_SOURCE_EXTENSIONS)),
    )


def save_snapshot(snapshot: ProjectSnapshot, path: str | Path) -> None:
    doc = snapshot_to_dict(snapshot)
    validate_snapshot_dict(doc)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True), "utf-8")


def load_snapshot(path: str | Path) -> ProjectSnapshot:
    try:
        doc = json.loads(Path(path).read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaViolation("", f"not valid JSON: {exc}") from exc
    return snapshot_from_dict(doc)
